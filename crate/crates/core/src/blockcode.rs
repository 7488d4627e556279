//! Linear block codes over a finite field.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::galois::Field;
use crate::matrix::Matrix;
use crate::{checked_pow, Error, Guards, Result};

/// Number of nonzero coordinates.
pub fn weight(v: &[u32]) -> usize {
    v.iter().filter(|&&x| x != 0).count()
}

/// Closed interval known to contain the minimum distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceBound {
    pub lo: usize,
    pub hi: usize,
}

impl DistanceBound {
    pub fn exact(d: usize) -> Self {
        DistanceBound { lo: d, hi: d }
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn value(&self) -> Option<usize> {
        self.is_exact().then_some(self.lo)
    }

    pub fn contains(&self, d: usize) -> bool {
        self.lo <= d && d <= self.hi
    }

    /// Intersection with another valid interval for the same code.
    pub fn meet(&self, other: DistanceBound) -> DistanceBound {
        DistanceBound { lo: self.lo.max(other.lo), hi: self.hi.min(other.hi) }
    }
}

/// Transitivity certificate. Only cyclicity is checked, so a negative
/// answer is never produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transitivity {
    Cyclic,
    Unknown,
}

impl fmt::Display for Transitivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Transitivity::Cyclic => "cyclic",
            Transitivity::Unknown => "unknown",
        })
    }
}

/// A linear `[n, k]` code stored by its reduced row echelon generator.
///
/// The zero code (`k = 0`) exists only as an explicit sentinel built by
/// [`LinearCode::zero`] or returned by [`LinearCode::dual`].
#[derive(Clone, PartialEq, Eq)]
pub struct LinearCode {
    field: Field,
    generator: Matrix,
    parity: Matrix,
    distance: DistanceBound,
    name: String,
}

impl fmt::Debug for LinearCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: [{}, {}, ", self.name, self.len(), self.dim())?;
        match self.distance.value() {
            Some(d) => write!(f, "{d}]")?,
            None => write!(f, "{}..{}]", self.distance.lo, self.distance.hi)?,
        }
        write!(f, " over {}", self.field)
    }
}

impl LinearCode {
    /// Row space of `m`. Rejects the zero matrix.
    pub fn from_generator(m: &Matrix) -> Result<LinearCode> {
        if m.cols() == 0 {
            return Err(Error::InvalidArgument("code length must be at least 1".into()));
        }
        let generator = m.echelon().reduced;
        if generator.rows() == 0 {
            return Err(Error::ZeroCode);
        }
        let parity = generator.null_space();
        let (n, k) = (generator.cols(), generator.rows());
        Ok(LinearCode {
            field: m.field().clone(),
            generator,
            parity,
            distance: DistanceBound { lo: 1, hi: n - k + 1 },
            name: String::from("code"),
        })
    }

    pub fn zero(field: &Field, n: usize) -> LinearCode {
        LinearCode {
            field: field.clone(),
            generator: Matrix::zeros(field, 0, n),
            parity: Matrix::identity(field, n),
            distance: DistanceBound { lo: 0, hi: 0 },
            name: String::from("zero"),
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Narrows the stored distance interval. The caller vouches for `bound`.
    pub fn with_distance_bound(mut self, bound: DistanceBound) -> Result<Self> {
        let met = self.distance.meet(bound);
        if met.lo > met.hi {
            return Err(Error::Internal(format!(
                "distance bound {bound:?} is inconsistent with {:?}",
                self.distance
            )));
        }
        self.distance = met;
        Ok(self)
    }

    /// Runs the exhaustive search and caches the exact distance.
    pub fn with_exact_distance(self, guards: &Guards) -> Result<Self> {
        let d = self.min_distance(guards)?;
        self.with_distance_bound(DistanceBound::exact(d))
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Length n.
    pub fn len(&self) -> usize {
        self.generator.cols()
    }

    /// Dimension k.
    pub fn dim(&self) -> usize {
        self.generator.rows()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.len()
    }

    pub fn generator(&self) -> &Matrix {
        &self.generator
    }

    pub fn parity_check(&self) -> &Matrix {
        &self.parity
    }

    pub fn distance(&self) -> DistanceBound {
        self.distance
    }

    pub fn encode(&self, message: &[u32]) -> Vec<u32> {
        self.generator.vec_mul(message)
    }

    /// Membership test through the parity-check matrix.
    pub fn contains(&self, v: &[u32]) -> bool {
        let f = &self.field;
        (0..self.parity.rows()).all(|r| {
            self.parity.row(r).iter().zip(v).fold(0, |acc, (&h, &x)| f.add(acc, f.mul(h, x))) == 0
        })
    }

    /// Euclidean dual. Full and zero codes map to each other.
    pub fn dual(&self) -> LinearCode {
        let name = format!("dual({})", self.name);
        if self.is_full() {
            return LinearCode::zero(&self.field, self.len()).with_name(name);
        }
        let mut d = LinearCode::from_generator(&self.parity).expect("parity check of a non-full code is nonzero");
        d.name = name;
        d
    }

    /// Exact minimum distance by enumerating every nonzero message up to scaling.
    pub fn min_distance(&self, guards: &Guards) -> Result<usize> {
        if self.is_zero() {
            return Err(Error::ZeroCode);
        }
        if let Some(d) = self.distance.value() {
            return Ok(d);
        }
        let q = self.field.order() as u64;
        let k = self.dim();
        match checked_pow(q, k) {
            Some(total) if total <= guards.max_codewords => {}
            _ => return Err(Error::guard("codeword enumeration", format!("{q}^{k}"), guards.max_codewords)),
        }
        Ok(self.enumerate_min_weight())
    }

    fn enumerate_min_weight(&self) -> usize {
        let f = &self.field;
        let q = f.order() as usize;
        let k = self.dim();
        let n = self.len();
        let g = &self.generator;
        // scaled[r][c] is c * row r
        let scaled: Vec<Vec<Vec<u32>>> = (0..k)
            .map(|r| {
                f.elements()
                    .map(|c| g.row(r).iter().map(|&x| f.mul(c, x)).collect())
                    .collect()
            })
            .collect();
        let support: Vec<Vec<usize>> =
            (0..k).map(|r| (0..n).filter(|&c| g.get(r, c) != 0).collect()).collect();
        let mut best = n;
        // Projective enumeration: the first nonzero message symbol is 1.
        for lead in 0..k {
            let mut word = g.row(lead).to_vec();
            let mut wt = weight(&word);
            best = best.min(wt);
            let tail = k - 1 - lead;
            let mut digits = vec![0usize; tail];
            let steps = q.pow(tail as u32);
            for t in 1..steps {
                let mut i = 0;
                let mut tt = t;
                while tt % q == 0 {
                    tt /= q;
                    i += 1;
                }
                let old = digits[i];
                let new = (old + 1) % q;
                digits[i] = new;
                let delta = f.sub(new as u32, old as u32);
                let row = lead + 1 + i;
                let add = &scaled[row][delta as usize];
                for &c in &support[row] {
                    let before = word[c];
                    let after = f.add(before, add[c]);
                    word[c] = after;
                    match (before == 0, after == 0) {
                        (true, false) => wt += 1,
                        (false, true) => wt -= 1,
                        _ => {}
                    }
                }
                if wt < best {
                    best = wt;
                    if best == 1 {
                        return 1;
                    }
                }
            }
        }
        best
    }

    /// C ⊆ C⊥, i.e. G Gᵀ = 0.
    pub fn is_self_orthogonal(&self) -> bool {
        self.generator
            .mul(&self.generator.transpose())
            .map(|m| m.is_zero())
            .unwrap_or(false)
    }

    /// C = C⊥.
    pub fn is_self_dual(&self) -> bool {
        2 * self.dim() == self.len() && self.is_self_orthogonal()
    }

    /// True iff the right cyclic shift of every generator row lies in the code.
    pub fn is_cyclic(&self) -> bool {
        let n = self.len();
        (0..self.dim()).all(|r| {
            let row = self.generator.row(r);
            let mut shifted = Vec::with_capacity(n);
            shifted.push(row[n - 1]);
            shifted.extend_from_slice(&row[..n - 1]);
            self.contains(&shifted)
        })
    }

    pub fn transitivity(&self) -> Transitivity {
        if self.is_cyclic() {
            Transitivity::Cyclic
        } else {
            Transitivity::Unknown
        }
    }

    /// The code obtained by cyclically shifting every codeword one place to the right.
    pub fn shifted(&self) -> LinearCode {
        let n = self.len();
        let order: Vec<usize> = (0..n).map(|c| (c + n - 1) % n).collect();
        let mut out = LinearCode::from_generator(&self.generator.select_cols(&order))
            .expect("column permutation preserves rank");
        out.distance = self.distance;
        out.name = format!("shift({})", self.name);
        out
    }

    /// Generator rows permuted as given; the row space is unchanged.
    pub fn generator_rows(&self, order: &[usize]) -> Result<Matrix> {
        let k = self.dim();
        let mut seen = vec![false; k];
        if order.len() != k {
            return Err(Error::InvalidArgument(format!("row order must list {k} rows")));
        }
        for &r in order {
            if r >= k || std::mem::replace(&mut seen[r], true) {
                return Err(Error::InvalidArgument(format!("{order:?} is not a permutation of 0..{k}")));
            }
        }
        Ok(self.generator.select_rows(order))
    }
}

/// Cyclic code of length `n` with generator polynomial `g` (coefficients low to high).
pub fn cyclic_from_generator_poly(field: &Field, n: usize, g: &[u32]) -> Result<LinearCode> {
    let deg = g.iter().rposition(|&c| c != 0).ok_or(Error::ZeroCode)?;
    if deg >= n {
        return Err(Error::ZeroCode);
    }
    let k = n - deg;
    let mut m = Matrix::zeros(field, k, n);
    for r in 0..k {
        for (i, &c) in g[..=deg].iter().enumerate() {
            m.set(r, r + i, field.check(c)?);
        }
    }
    LinearCode::from_generator(&m)
}

/// A uniformly random `k`-dimensional code of length `n`.
pub fn random_code<R: Rng + ?Sized>(field: &Field, n: usize, k: usize, rng: &mut R) -> Result<LinearCode> {
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("need 1 <= k <= n, got k={k}, n={n}")));
    }
    let q = field.order();
    loop {
        let data: Vec<u32> = (0..n * k).map(|_| rng.gen_range(0..q)).collect();
        let m = Matrix::from_flat(field, k, n, data)?;
        if m.rank() == k {
            return Ok(LinearCode::from_generator(&m)?.with_name(format!("random[{n},{k}]")));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gf(p: u32, e: u32) -> Field {
        Field::new(p, e, None).unwrap()
    }

    fn hamming74() -> LinearCode {
        cyclic_from_generator_poly(&gf(2, 1), 7, &[1, 1, 0, 1]).unwrap()
    }

    fn brute_force_distance(c: &LinearCode) -> usize {
        // lexicographic message order, direct encoding
        let q = c.field().order();
        let k = c.dim();
        let mut best = usize::MAX;
        for idx in 1..q.pow(k as u32) {
            let mut t = idx;
            let msg: Vec<u32> = (0..k)
                .map(|_| {
                    let d = t % q;
                    t /= q;
                    d
                })
                .collect();
            best = best.min(weight(&c.encode(&msg)));
        }
        best
    }

    #[test]
    fn full_code() {
        let f = gf(2, 1);
        let c = LinearCode::from_generator(&Matrix::identity(&f, 3)).unwrap();
        assert_eq!((c.len(), c.dim()), (3, 3));
        assert_eq!(c.min_distance(&Guards::default()).unwrap(), 1);
        let d = c.dual();
        assert!(d.is_zero());
        assert_eq!(d.min_distance(&Guards::default()), Err(Error::ZeroCode));
        assert!(d.dual().is_full());
    }

    #[test]
    fn rank_from_rows() {
        let f = gf(2, 1);
        let c = LinearCode::from_generator(&Matrix::from_rows(&f, &[vec![1, 1, 1, 0], vec![0, 1, 1, 1]]).unwrap())
            .unwrap();
        assert_eq!((c.len(), c.dim()), (4, 2));
        let c = LinearCode::from_generator(&Matrix::from_rows(&f, &[vec![1, 1], vec![1, 1]]).unwrap()).unwrap();
        assert_eq!(c.dim(), 1);
        assert_eq!(
            LinearCode::from_generator(&Matrix::zeros(&f, 2, 3)).unwrap_err(),
            Error::ZeroCode
        );
    }

    #[test]
    fn hamming_and_simplex() {
        let h = hamming74();
        assert_eq!(h.min_distance(&Guards::default()).unwrap(), 3);
        assert!(h.is_cyclic());
        let s = h.dual();
        assert_eq!((s.len(), s.dim()), (7, 3));
        assert_eq!(s.min_distance(&Guards::default()).unwrap(), 4);
        assert!(h.generator().mul(&h.parity_check().transpose()).unwrap().is_zero());
    }

    #[test]
    fn repetition_distance() {
        let f = gf(3, 1);
        let c = LinearCode::from_generator(&Matrix::from_rows(&f, &[vec![1; 5]]).unwrap()).unwrap();
        assert_eq!(c.min_distance(&Guards::default()).unwrap(), 5);
        assert!(c.is_cyclic());
    }

    #[test]
    fn reed_solomon_4_2_over_gf4() {
        let f = gf(2, 2);
        // evaluations of 1 and x at the four field elements
        let m = Matrix::from_rows(&f, &[vec![1, 1, 1, 1], vec![0, 1, 2, 3]]).unwrap();
        let c = LinearCode::from_generator(&m).unwrap();
        assert_eq!(c.min_distance(&Guards::default()).unwrap(), 3);
    }

    #[test]
    fn self_duality() {
        let f = gf(2, 1);
        let ext = Matrix::from_rows(
            &f,
            &[
                vec![1, 0, 0, 0, 0, 1, 1, 1],
                vec![0, 1, 0, 0, 1, 0, 1, 1],
                vec![0, 0, 1, 0, 1, 1, 0, 1],
                vec![0, 0, 0, 1, 1, 1, 1, 0],
            ],
        )
        .unwrap();
        let c = LinearCode::from_generator(&ext).unwrap();
        assert!(c.is_self_dual());
        let rep2 = LinearCode::from_generator(&Matrix::from_rows(&f, &[vec![1, 1]]).unwrap()).unwrap();
        assert!(rep2.is_self_dual());
        let rep3 = LinearCode::from_generator(&Matrix::from_rows(&f, &[vec![1, 1, 1]]).unwrap()).unwrap();
        assert!(!rep3.is_self_orthogonal());
    }

    #[test]
    fn non_cyclic_counterexample() {
        let f = gf(2, 1);
        let c = LinearCode::from_generator(&Matrix::from_rows(&f, &[vec![1, 1, 0, 0]]).unwrap()).unwrap();
        assert!(!c.is_cyclic());
        assert_eq!(c.transitivity(), Transitivity::Unknown);
    }

    #[test]
    fn weights() {
        assert_eq!(weight(&[0, 0, 0]), 0);
        assert_eq!(weight(&[1, 0, 2]), 2);
        assert_eq!(weight(&[1; 6]), 6);
    }

    #[test]
    fn guard_is_enforced() {
        let f = gf(2, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = random_code(&f, 30, 20, &mut rng).unwrap();
        let guards = Guards { max_codewords: 1 << 10, ..Guards::default() };
        assert!(matches!(c.min_distance(&guards), Err(Error::GuardExceeded { .. })));
    }

    proptest! {
        #[test]
        fn random_code_invariants(seed in 0u64..1000, q in prop_oneof![Just((2u32, 1u32)), Just((3, 1)), Just((2, 2))],
                                  n in 2usize..10, kfrac in 0.0f64..1.0) {
            let f = gf(q.0, q.1);
            let k = 1 + ((n - 1) as f64 * kfrac) as usize;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c = random_code(&f, n, k, &mut rng).unwrap();
            let d = c.min_distance(&Guards::default()).unwrap();
            prop_assert!(d <= n - k + 1);
            prop_assert_eq!(d, brute_force_distance(&c));
            let dual = c.dual();
            prop_assert_eq!(c.dim() + dual.dim(), n);
            if !dual.is_zero() {
                prop_assert!(c.generator().mul(&dual.generator().transpose()).unwrap().is_zero());
                let dd = dual.dual();
                prop_assert_eq!(dd.generator(), c.generator());
            }
            if c.is_self_dual() {
                prop_assert!(c.is_self_orthogonal());
                prop_assert_eq!(n % 2, 0);
            }
            if c.is_cyclic() {
                let s = c.shifted();
                prop_assert_eq!(s.generator(), c.generator());
            }
        }
    }
}
