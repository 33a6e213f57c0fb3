//! Tolerance-aware lookup of similitudes.
//!
//! Maps are projected onto a single scalar key with fixed, mutually
//! irrational weights. Two maps that agree entrywise within `tol` have keys
//! within `tol · Σ|w|`, so candidates are found by a range query on the sorted
//! keys and then confirmed entrywise.

use super::similitude::Similitude;

const WEIGHTS: [f64; 12] = [
    1.0,
    0.754_877_666_246_692_7,
    0.569_840_290_998_053_3,
    0.430_159_709_001_946_7,
    0.324_717_957_244_746,
    0.245_122_333_753_307_3,
    0.185_037_170_770_859_4,
    0.139_680_581_473_886_6,
    0.105_442_034_535_453_7,
    0.079_597_497_799_287_3,
    0.060_087_198_715_428_8,
    0.045_357_869_829_883_2,
];

fn key(s: &Similitude) -> f64 {
    s.entries().zip(WEIGHTS.iter().cycle()).map(|(v, w)| v * w).sum()
}

fn window(s: &Similitude, tol: f64) -> f64 {
    let n = s.dim() * s.dim() + s.dim();
    tol * WEIGHTS.iter().cycle().take(n).sum::<f64>() * (1.0 + 1e-12)
}

/// A static set of similitudes supporting approximate membership queries.
pub struct SimilitudeIndex<'a> {
    items: &'a [Similitude],
    order: Vec<(f64, usize)>,
    tol: f64,
}

impl<'a> SimilitudeIndex<'a> {
    /// Indexes `items`; lookups match entrywise within the absolute `tol`.
    pub fn new(items: &'a [Similitude], tol: f64) -> Self {
        let mut order: Vec<(f64, usize)> = items.iter().enumerate().map(|(i, s)| (key(s), i)).collect();
        order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        Self { items, order, tol }
    }

    /// Index of the first-inserted matching element.
    pub fn find(&self, s: &Similitude) -> Option<usize> {
        let k = key(s);
        let w = window(s, self.tol);
        let lo = self.order.partition_point(|(x, _)| *x < k - w);
        self.order[lo..]
            .iter()
            .take_while(|(x, _)| *x <= k + w)
            .filter(|(_, i)| self.items[*i].approx_eq(s, self.tol))
            .map(|(_, i)| *i)
            .min()
    }

    pub fn contains(&self, s: &Similitude) -> bool {
        self.find(s).is_some()
    }
}

/// Returns, for each item, the index of its representative: the smallest
/// index among the items it is (transitively) equal to within `tol`.
pub fn dedup_similitudes(items: &[Similitude], tol: f64) -> Vec<usize> {
    let n = items.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let mut order: Vec<(f64, usize)> = items.iter().enumerate().map(|(i, s)| (key(s), i)).collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    for p in 0..order.len() {
        let (kp, ip) = order[p];
        let w = window(&items[ip], tol);
        for q in (0..p).rev() {
            let (kq, iq) = order[q];
            if kp - kq > w {
                break;
            }
            if items[ip].approx_eq(&items[iq], tol) {
                let (a, b) = (root(&mut parent, ip), root(&mut parent, iq));
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                parent[hi] = lo;
            }
        }
    }
    (0..n).map(|i| root(&mut parent, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_near_duplicates() {
        let a = Similitude::planar(0.5, 0.0, 1.0, 0.0, 0.5, 2.0).unwrap();
        let b = Similitude::planar(0.5, 0.0, 1.0 + 1e-12, 0.0, 0.5, 2.0).unwrap();
        let c = Similitude::planar(0.5, 0.0, 1.1, 0.0, 0.5, 2.0).unwrap();
        let items = vec![a.clone(), c.clone()];
        let idx = SimilitudeIndex::new(&items, 1e-9);
        assert_eq!(idx.find(&b), Some(0));
        assert_eq!(idx.find(&c), Some(1));
        assert!(!idx.contains(&Similitude::identity(2)));

        let reps = dedup_similitudes(&[c.clone(), a, b, c], 1e-9);
        assert_eq!(reps, vec![0, 1, 1, 0]);
    }
}
