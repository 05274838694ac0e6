use crate::objectives::{ObjectivePair, Solution};
use crate::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct ArchiveEntry<T> {
    pub solution: Solution<T>,
    pub objectives: ObjectivePair<T>,
}

/// Set of solutions with mutually non-dominated, pairwise distinct objective
/// vectors. Members keep insertion order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Archive<T> {
    entries: Vec<ArchiveEntry<T>>,
}

impl<T: Scalar> Archive<T> {
    pub fn new() -> Self {
        Self { entries: Vec::new() }
    }

    /// Inserts `solution` unless a member strongly dominates it; on insertion
    /// every member it weakly dominates (equal vectors included) is dropped.
    pub fn insert(&mut self, solution: Solution<T>, objectives: ObjectivePair<T>) -> bool {
        if self
            .entries
            .iter()
            .any(|e| e.objectives.strongly_dominates(&objectives))
        {
            return false;
        }
        self.entries
            .retain(|e| !objectives.weakly_dominates(&e.objectives));
        self.entries.push(ArchiveEntry { solution, objectives });
        true
    }

    /// Would `objectives` be accepted by [`Archive::insert`]?
    pub fn accepts(&self, objectives: &ObjectivePair<T>) -> bool {
        !self
            .entries
            .iter()
            .any(|e| e.objectives.strongly_dominates(objectives))
    }

    pub fn entries(&self) -> &[ArchiveEntry<T>] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, index: usize) -> &ArchiveEntry<T> {
        &self.entries[index]
    }

    pub fn solutions(&self) -> Vec<Solution<T>> {
        self.entries.iter().map(|e| e.solution.clone()).collect()
    }

    pub(crate) fn retain_indices(&mut self, keep: &[bool]) {
        let mut it = keep.iter();
        self.entries.retain(|_| *it.next().expect("one flag per entry"));
    }

    /// No member weakly dominates another.
    pub fn is_antichain(&self) -> bool {
        self.entries.iter().enumerate().all(|(i, a)| {
            self.entries
                .iter()
                .enumerate()
                .all(|(j, b)| i == j || !a.objectives.weakly_dominates(&b.objectives))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{Item, KnapsackInstance};
    use crate::objectives::FitnessKind;

    fn setup() -> (KnapsackInstance<f64>, Solution<f64>) {
        let inst = KnapsackInstance::new("a", vec![Item::new(1.0, 0.0, 1.0)], 1.0).unwrap();
        let s = Solution::empty(&inst);
        (inst, s)
    }

    fn pair(a: f64, b: f64) -> ObjectivePair<f64> {
        ObjectivePair::new(a, b, FitnessKind::G)
    }

    #[test]
    fn insertion_rule() {
        let (_, s) = setup();
        let mut ar = Archive::new();
        assert!(ar.insert(s.clone(), pair(5.0, 3.0)));
        assert!(ar.insert(s.clone(), pair(0.0, 0.0)));
        assert!(!ar.insert(s.clone(), pair(4.0, 3.0)));
        // Equal vector replaces the incumbent.
        assert!(ar.insert(s.clone(), pair(5.0, 3.0)));
        assert_eq!(ar.len(), 2);
        assert_eq!(ar.get(1).objectives, pair(5.0, 3.0));
        assert!(ar.insert(s.clone(), pair(6.0, 2.0)));
        assert_eq!(ar.len(), 2);
        assert!(ar.is_antichain());
        let firsts: Vec<f64> = ar.entries().iter().map(|e| e.objectives.first).collect();
        assert_eq!(firsts, [0.0, 6.0]);
    }
}
