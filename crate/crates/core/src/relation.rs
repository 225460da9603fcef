//! Binary relations over the states of one automaton, stored as boolean
//! matrices. Entry `(p, q)` reads "q is at least as large as p".

use std::fmt;

use fixedbitset::FixedBitSet;

use crate::error::RelationError;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    rows: Vec<FixedBitSet>,
}

impl Relation {
    pub fn empty(n: usize) -> Self {
        Relation {
            rows: (0..n).map(|_| FixedBitSet::with_capacity(n)).collect(),
        }
    }

    pub fn full(n: usize) -> Self {
        let mut r = Self::empty(n);
        for row in &mut r.rows {
            row.insert_range(..);
        }
        r
    }

    pub fn identity(n: usize) -> Self {
        let mut r = Self::empty(n);
        for (i, row) in r.rows.iter_mut().enumerate() {
            row.insert(i);
        }
        r
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut r = Self::empty(n);
        for p in 0..n {
            for q in 0..n {
                if f(p, q) {
                    r.rows[p].insert(q);
                }
            }
        }
        r
    }

    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Self {
        let mut r = Self::empty(n);
        for &(p, q) in pairs {
            r.insert(p, q);
        }
        r
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn contains(&self, p: usize, q: usize) -> bool {
        self.rows[p].contains(q)
    }

    #[inline]
    pub fn insert(&mut self, p: usize, q: usize) {
        self.rows[p].insert(q);
    }

    #[inline]
    pub fn remove(&mut self, p: usize, q: usize) {
        self.rows[p].set(q, false);
    }

    pub fn row(&self, p: usize) -> &FixedBitSet {
        &self.rows[p]
    }

    /// States `q` with `(p, q)` in the relation.
    pub fn successors(&self, p: usize) -> impl Iterator<Item = usize> + '_ {
        self.rows[p].ones()
    }

    /// States `p` with `(p, q)` in the relation.
    pub fn predecessors(&self, q: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.dim()).filter(move |&p| self.rows[p].contains(q))
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(p, row)| row.ones().map(move |q| (p, q)))
    }

    pub fn count(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones(..)).sum()
    }

    pub fn check_dim(&self, n: usize) -> Result<(), RelationError> {
        if self.dim() == n {
            Ok(())
        } else {
            Err(RelationError::Dimension {
                expected: n,
                found: self.dim(),
            })
        }
    }

    pub fn inverse(&self) -> Self {
        let n = self.dim();
        let mut r = Self::empty(n);
        for (p, q) in self.pairs() {
            r.insert(q, p);
        }
        r
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut r = self.clone();
        for (a, b) in r.rows.iter_mut().zip(&other.rows) {
            a.intersect_with(b);
        }
        r
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut r = self.clone();
        for (a, b) in r.rows.iter_mut().zip(&other.rows) {
            a.union_with(b);
        }
        r
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.rows
            .iter()
            .zip(&other.rows)
            .all(|(a, b)| a.is_subset(b))
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.dim()).all(|i| self.contains(i, i))
    }

    pub fn is_symmetric(&self) -> bool {
        self.pairs().all(|(p, q)| self.contains(q, p))
    }

    pub fn is_transitive(&self) -> bool {
        self.pairs()
            .all(|(p, q)| self.rows[q].is_subset(&self.rows[p]))
    }

    pub fn is_preorder(&self) -> bool {
        self.is_reflexive() && self.is_transitive()
    }

    pub fn is_equivalence(&self) -> bool {
        self.is_preorder() && self.is_symmetric()
    }

    /// Smallest transitive superset (Warshall's algorithm on bit rows).
    pub fn transitive_closure(&self) -> Self {
        let mut r = self.clone();
        let n = r.dim();
        for k in 0..n {
            let row_k = r.rows[k].clone();
            for i in 0..n {
                if r.rows[i].contains(k) {
                    r.rows[i].union_with(&row_k);
                }
            }
        }
        r
    }

    /// `R \ R⁻¹`: the pairs related one way only.
    pub fn strict_part(&self) -> Self {
        Self::from_fn(self.dim(), |p, q| {
            self.contains(p, q) && !self.contains(q, p)
        })
    }

    /// `R ∩ R⁻¹`.
    pub fn induced_equivalence(&self) -> Self {
        Self::from_fn(self.dim(), |p, q| {
            self.contains(p, q) && self.contains(q, p)
        })
    }

    /// Equivalence classes of an equivalence relation, each sorted, listed by
    /// smallest member.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let n = self.dim();
        let mut assigned = FixedBitSet::with_capacity(n);
        let mut out = Vec::new();
        for p in 0..n {
            if assigned.contains(p) {
                continue;
            }
            let class: Vec<usize> = self.rows[p]
                .ones()
                .filter(|&q| !assigned.contains(q))
                .collect();
            let class = if class.contains(&p) { class } else { vec![p] };
            for &q in &class {
                assigned.insert(q);
            }
            out.push(class);
        }
        out
    }
}

pub fn transitive_closure(r: &Relation) -> Relation {
    r.transitive_closure()
}

pub fn strict_part(r: &Relation) -> Relation {
    r.strict_part()
}

pub fn induced_equiv(r: &Relation) -> Relation {
    r.induced_equivalence()
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Relation({})", self.dim())?;
        for row in &self.rows {
            let line: String = (0..self.dim())
                .map(|q| if row.contains(q) { '1' } else { '.' })
                .collect();
            writeln!(f, "  {line}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cubic_closure(r: &Relation) -> Relation {
        let n = r.dim();
        let mut m: Vec<Vec<bool>> = (0..n)
            .map(|p| (0..n).map(|q| r.contains(p, q)).collect())
            .collect();
        loop {
            let mut changed = false;
            for p in 0..n {
                for q in 0..n {
                    if m[p][q] {
                        continue;
                    }
                    if (0..n).any(|s| m[p][s] && m[s][q]) {
                        m[p][q] = true;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        Relation::from_fn(n, |p, q| m[p][q])
    }

    #[test]
    fn chain_closure_adds_shortcut() {
        let r = Relation::from_pairs(3, &[(0, 1), (1, 2)]);
        let c = r.transitive_closure();
        assert!(c.contains(0, 2));
        assert_eq!(c.count(), 3);
    }

    #[test]
    fn transitive_relation_unchanged() {
        let r = Relation::from_pairs(3, &[(0, 1), (1, 2), (0, 2), (1, 1)]);
        assert_eq!(r.transitive_closure(), r);
    }

    #[test]
    fn identity_parts() {
        let id = Relation::identity(4);
        assert_eq!(id.strict_part().count(), 0);
        assert_eq!(id.induced_equivalence(), id);
    }

    #[test]
    fn total_preorder_on_two_states() {
        let r = Relation::full(2);
        assert_eq!(r.strict_part().count(), 0);
        assert_eq!(r.induced_equivalence(), r);
        assert_eq!(r.induced_equivalence().classes(), vec![vec![0, 1]]);
    }

    proptest! {
        #[test]
        fn closure_matches_cubic_oracle(n in 1usize..7, bits in proptest::collection::vec(any::<bool>(), 49)) {
            let r = Relation::from_fn(n, |p, q| bits[p * 7 + q]);
            prop_assert_eq!(r.transitive_closure(), cubic_closure(&r));
        }

        #[test]
        fn strict_and_equiv_of_preorders(n in 1usize..7, bits in proptest::collection::vec(any::<bool>(), 49)) {
            let r = Relation::from_fn(n, |p, q| p == q || bits[p * 7 + q]).transitive_closure();
            let s = r.strict_part();
            let e = r.induced_equivalence();
            prop_assert!(e.is_equivalence());
            prop_assert!((0..n).all(|p| !s.contains(p, p)));
            prop_assert!(s.is_transitive());
            prop_assert_eq!(s.union(&e), r);
        }
    }
}
