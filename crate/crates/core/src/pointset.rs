use fixedbitset::FixedBitSet;

/// A set of points of a polar space, as a bitset over its dense point indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PointSet {
    bits: FixedBitSet,
}

impl PointSet {
    pub fn empty(universe: usize) -> Self {
        PointSet { bits: FixedBitSet::with_capacity(universe) }
    }

    pub fn full(universe: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(universe);
        bits.insert_range(..);
        PointSet { bits }
    }

    pub fn from_indices(universe: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(universe);
        for i in indices {
            s.insert(i);
        }
        s
    }

    pub fn from_bits(bits: FixedBitSet) -> Self {
        PointSet { bits }
    }

    /// Number of points of the underlying space.
    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.bits.contains(i)
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.universe(), "point index {i} outside universe {}", self.universe());
        self.bits.insert(i);
    }

    pub fn remove(&mut self, i: usize) {
        self.bits.set(i, false);
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub fn bits(&self) -> &FixedBitSet {
        &self.bits
    }

    pub fn count_in(&self, other: &FixedBitSet) -> usize {
        self.bits.intersection_count(other)
    }

    pub fn is_disjoint(&self, other: &PointSet) -> bool {
        self.bits.is_disjoint(&other.bits)
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.bits.is_subset(&other.bits)
    }

    pub fn intersection(&self, other: &PointSet) -> PointSet {
        let mut bits = self.bits.clone();
        bits.intersect_with(&other.bits);
        PointSet { bits }
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        let mut bits = self.bits.clone();
        bits.union_with(&other.bits);
        PointSet { bits }
    }

    pub fn difference(&self, other: &PointSet) -> PointSet {
        let mut bits = self.bits.clone();
        bits.difference_with(&other.bits);
        PointSet { bits }
    }

    /// Complement inside the whole universe.
    pub fn complement(&self) -> PointSet {
        let mut bits = self.bits.clone();
        bits.toggle_range(..);
        PointSet { bits }
    }
}
