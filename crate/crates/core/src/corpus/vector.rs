use crate::{Error, Result};

/// A document as `(feature-id, strength)` pairs, strictly ascending by id,
/// with every strength positive.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseVector {
    pairs: Vec<(u32, f64)>,
}

impl SparseVector {
    pub fn new() -> Self {
        SparseVector::default()
    }

    /// Validates and sorts arbitrary pairs. Duplicate ids and non-positive or
    /// non-finite strengths are rejected.
    pub fn from_pairs(mut pairs: Vec<(u32, f64)>) -> Result<Self> {
        pairs.sort_by_key(|&(id, _)| id);
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidVector(format!("duplicate feature id {}", w[0].0)));
            }
        }
        if let Some(&(id, s)) = pairs.iter().find(|&&(_, s)| !(s > 0.0 && s.is_finite())) {
            return Err(Error::InvalidVector(format!("feature {id} has strength {s}")));
        }
        Ok(SparseVector { pairs })
    }

    /// Boolean vector over a set of ids; duplicates collapse.
    pub fn binary<I: IntoIterator<Item = u32>>(ids: I) -> Self {
        let mut ids: Vec<u32> = ids.into_iter().collect();
        ids.sort_unstable();
        ids.dedup();
        SparseVector {
            pairs: ids.into_iter().map(|id| (id, 1.0)).collect(),
        }
    }

    pub(crate) fn from_sorted_unchecked(pairs: Vec<(u32, f64)>) -> Self {
        debug_assert!(pairs.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(pairs.iter().all(|&(_, s)| s > 0.0));
        SparseVector { pairs }
    }

    pub fn pairs(&self) -> &[(u32, f64)] {
        &self.pairs
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn ids(&self) -> impl Iterator<Item = u32> + '_ {
        self.pairs.iter().map(|&(id, _)| id)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn total_strength(&self) -> f64 {
        self.pairs.iter().fold(0.0, |acc, &(_, s)| acc + s)
    }

    pub fn contains(&self, id: u32) -> bool {
        self.pairs.binary_search_by_key(&id, |&(i, _)| i).is_ok()
    }

    /// Multiplies every strength by `factor`, which must be positive.
    pub fn scaled(&self, factor: f64) -> SparseVector {
        assert!(factor > 0.0, "scale factor must be positive");
        SparseVector {
            pairs: self.pairs.iter().map(|&(id, s)| (id, s * factor)).collect(),
        }
    }
}

/// Length normalization: each strength divided by the document's total
/// strength. The empty vector is returned unchanged.
pub fn normalize(v: &SparseVector) -> SparseVector {
    if v.is_empty() {
        return v.clone();
    }
    let total = v.total_strength();
    SparseVector {
        pairs: v.pairs.iter().map(|&(id, s)| (id, s / total)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn normalize_examples() {
        let v = SparseVector::from_pairs(vec![(0, 2.0), (1, 1.0)]).unwrap();
        assert_eq!(normalize(&v).pairs(), &[(0, 2.0 / 3.0), (1, 1.0 / 3.0)]);
        let v = SparseVector::from_pairs(vec![(4, 5.0)]).unwrap();
        assert_eq!(normalize(&v).pairs(), &[(4, 1.0)]);
        assert!(normalize(&SparseVector::new()).is_empty());
    }

    #[test]
    fn from_pairs_validates() {
        assert!(SparseVector::from_pairs(vec![(1, 1.0), (1, 2.0)]).is_err());
        assert!(SparseVector::from_pairs(vec![(1, 0.0)]).is_err());
        assert!(SparseVector::from_pairs(vec![(1, -1.0)]).is_err());
        assert!(SparseVector::from_pairs(vec![(1, f64::NAN)]).is_err());
        let v = SparseVector::from_pairs(vec![(3, 1.0), (1, 2.0)]).unwrap();
        assert_eq!(v.pairs(), &[(1, 2.0), (3, 1.0)]);
    }

    proptest! {
        #[test]
        fn normalized_strengths_sum_to_one(
            raw in proptest::collection::btree_map(0u32..10_000, 0.001f64..1000.0, 1..200)
        ) {
            let v = SparseVector::from_pairs(raw.into_iter().collect()).unwrap();
            let n = normalize(&v);
            prop_assert!((n.total_strength() - 1.0).abs() <= 1e-9);
            prop_assert_eq!(n.len(), v.len());
        }
    }
}
