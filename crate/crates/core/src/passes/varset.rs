/// Dense set of variable indices (positions in `Program::vars`).
#[derive(Clone, Default)]
pub struct VarSet {
    words: Vec<u64>,
}

impl VarSet {
    fn significant(&self) -> &[u64] {
        let end = self.words.iter().rposition(|&w| w != 0).map_or(0, |k| k + 1);
        &self.words[..end]
    }
}

impl PartialEq for VarSet {
    fn eq(&self, other: &Self) -> bool {
        self.significant() == other.significant()
    }
}

impl Eq for VarSet {}

impl std::hash::Hash for VarSet {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.significant().hash(state)
    }
}

impl VarSet {
    pub fn with_capacity(nvars: usize) -> VarSet {
        VarSet {
            words: vec![0; nvars.div_ceil(64)],
        }
    }

    pub fn insert(&mut self, i: usize) {
        self.grow(i);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        if let Some(w) = self.words.get_mut(i / 64) {
            *w &= !(1 << (i % 64));
        }
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words.get(i / 64).is_some_and(|w| w & (1 << (i % 64)) != 0)
    }

    pub fn union(&self, other: &VarSet) -> VarSet {
        let n = self.words.len().max(other.words.len());
        let words = (0..n)
            .map(|k| self.words.get(k).unwrap_or(&0) | other.words.get(k).unwrap_or(&0))
            .collect();
        VarSet { words }
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            (0..64).filter(move |b| w & (1 << b) != 0).map(move |b| k * 64 + b)
        })
    }

    fn grow(&mut self, i: usize) {
        if i / 64 >= self.words.len() {
            self.words.resize(i / 64 + 1, 0);
        }
    }
}

impl std::fmt::Debug for VarSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<usize> for VarSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        let mut s = VarSet::default();
        for i in iter {
            s.insert(i);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_operations() {
        let mut a: VarSet = [1, 70].into_iter().collect();
        let b: VarSet = [2].into_iter().collect();
        assert!(a.contains(70) && !a.contains(2));
        let u = a.union(&b);
        assert_eq!(u.iter().collect::<Vec<_>>(), vec![1, 2, 70]);
        a.remove(70);
        a.remove(500);
        assert_eq!(a.len(), 1);
        assert_eq!(VarSet::with_capacity(300), VarSet::default());
        assert_eq!(b.union(&VarSet::with_capacity(300)), b);
    }
}
