use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pair {
    pub a: usize,
    pub b: usize,
    pub distance: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Pairing {
    /// In selection order, i.e. by increasing distance.
    pub pairs: Vec<Pair>,
    pub unmatched_a: Vec<usize>,
    pub unmatched_b: Vec<usize>,
}

impl Pairing {
    pub fn max_distance(&self) -> Option<f64> {
        self.pairs.iter().map(|p| p.distance).reduce(f64::max)
    }

    pub fn is_perfect(&self) -> bool {
        self.unmatched_a.is_empty() && self.unmatched_b.is_empty()
    }

    /// The same pairing with the roles of the two sets exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            pairs: self.pairs.iter().map(|p| Pair { a: p.b, b: p.a, distance: p.distance }).collect(),
            unmatched_a: self.unmatched_b.clone(),
            unmatched_b: self.unmatched_a.clone(),
        }
    }
}

/// Greedy nearest-pair matching: repeatedly takes the closest remaining pair
/// until none is within `cap`. Ties are broken on the unordered index pair so
/// that swapping `a` and `b` selects the same pairs.
pub fn match_sets(a: &[Complex64], b: &[Complex64], cap: f64) -> Pairing {
    let mut candidates: Vec<Pair> = Vec::with_capacity(a.len() * b.len());
    for (i, za) in a.iter().enumerate() {
        for (j, zb) in b.iter().enumerate() {
            let distance = (za - zb).norm();
            if distance <= cap {
                candidates.push(Pair { a: i, b: j, distance });
            }
        }
    }
    candidates.sort_by(|p, q| {
        p.distance
            .total_cmp(&q.distance)
            .then_with(|| (p.a.min(p.b), p.a.max(p.b)).cmp(&(q.a.min(q.b), q.a.max(q.b))))
            .then_with(|| p.a.cmp(&q.a))
    });
    let mut used_a = vec![false; a.len()];
    let mut used_b = vec![false; b.len()];
    let mut pairs = Vec::new();
    for p in candidates {
        if !used_a[p.a] && !used_b[p.b] {
            used_a[p.a] = true;
            used_b[p.b] = true;
            pairs.push(p);
        }
    }
    let free = |used: &[bool]| used.iter().enumerate().filter(|(_, u)| !**u).map(|(i, _)| i).collect();
    Pairing { pairs, unmatched_a: free(&used_a), unmatched_b: free(&used_b) }
}
