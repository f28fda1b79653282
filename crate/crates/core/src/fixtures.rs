//! Small hand-written programs used throughout the test suites.

use crate::frontend::parse_tac;
use crate::ir::Program;

/// Instruction 2 is unreachable.
pub const P1: &str = "tac v1
decl int x out
decl int y
0: x := 3
1: goto 3
2: y := 4
3: halt
";

/// `d` is dead.
pub const P2: &str = "tac v1
decl int d
decl int x out
0: d := 5
1: x := 7
2: halt
";

/// `b` is dead and `a` only feeds `b`.
pub const P3: &str = "tac v1
decl int a
decl int b
decl int x out
0: a := 1
1: b := a + 1
2: x := 2
3: halt
";

/// Constant condition: instruction 3 becomes unreachable once the branch folds.
pub const P4: &str = "tac v1
decl int x
decl int y
decl int z out
0: x := 3
1: y := x + 4
2: if y < 10 goto 4 else 3
3: halt
4: z := y
5: halt
";

/// Trivial self loop.
pub const P5: &str = "tac v1
0: goto 0
";

/// Both arms of the branch go to the next instruction.
pub const P6: &str = "tac v1
decl bool b in
0: if b goto 1 else 1
1: halt
";

fn load(text: &str) -> Program {
    parse_tac(text).expect("fixture parses")
}

pub fn p1() -> Program {
    load(P1)
}

pub fn p2() -> Program {
    load(P2)
}

pub fn p3() -> Program {
    load(P3)
}

pub fn p4() -> Program {
    load(P4)
}

pub fn p5() -> Program {
    load(P5)
}

pub fn p6() -> Program {
    load(P6)
}

pub fn all() -> Vec<(&'static str, Program)> {
    vec![
        ("P1", p1()),
        ("P2", p2()),
        ("P3", p3()),
        ("P4", p4()),
        ("P5", p5()),
        ("P6", p6()),
    ]
}
