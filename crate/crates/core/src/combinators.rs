//! Block-code combinators: expansion over a subfield, extension, puncturing,
//! direct sum, the `(u | u+v)` construction and the product code.
//!
//! Every combinator returns the new code together with a [`TransformRecord`]
//! carrying the parameters it guarantees. Distances are tracked as intervals
//! and only become exact once the output code is searched exhaustively.

use serde::{Deserialize, Serialize};

use crate::blockcode::{DistanceBound, LinearCode};
use crate::galois::SubfieldEmbedding;
use crate::matrix::Matrix;
use crate::{Error, Result};

/// Largest length a product code may have.
pub const MAX_PRODUCT_LENGTH: usize = 1 << 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformKind {
    Expand,
    Extend,
    Puncture,
    DirectSum,
    UUPlusV,
    Product,
    Dual,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformRecord {
    pub kind: TransformKind,
    pub inputs: Vec<String>,
    /// Punctured coordinate, 1-based.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coord: Option<usize>,
    /// Expansion basis as big-field encodings.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<u32>>,
    /// Expansion degree m.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    pub n: usize,
    pub k: usize,
    pub d_lo: usize,
    pub d_hi: usize,
}

#[derive(Debug, Clone)]
pub struct Transformed {
    pub code: LinearCode,
    pub record: TransformRecord,
}

fn nonzero(c: &LinearCode) -> Result<()> {
    if c.is_zero() {
        Err(Error::ZeroCode)
    } else {
        Ok(())
    }
}

fn finish(
    kind: TransformKind,
    inputs: &[&LinearCode],
    generator: &Matrix,
    expected_k: usize,
    bound: DistanceBound,
) -> Result<Transformed> {
    let names: Vec<String> = inputs.iter().map(|c| c.name().to_string()).collect();
    let label = match kind {
        TransformKind::Expand => "expand",
        TransformKind::Extend => "extend",
        TransformKind::Puncture => "puncture",
        TransformKind::DirectSum => "sum",
        TransformKind::UUPlusV => "uv",
        TransformKind::Product => "product",
        TransformKind::Dual => "dual",
    };
    let code = LinearCode::from_generator(generator)?
        .with_name(format!("{label}({})", names.join(",")));
    if code.dim() != expected_k {
        return Err(Error::Internal(format!(
            "{label} produced dimension {} instead of {expected_k}",
            code.dim()
        )));
    }
    let code = code.with_distance_bound(bound)?;
    let d = code.distance();
    let record = TransformRecord {
        kind,
        inputs: names,
        coord: None,
        basis: None,
        degree: None,
        n: code.len(),
        k: code.dim(),
        d_lo: d.lo,
        d_hi: d.hi,
    };
    Ok(Transformed { code, record })
}

/// Expands every symbol of a code over GF(q^m) into its coordinates over GF(q).
///
/// The result is an `[mn, mk, d* >= d]` code over the small field; the
/// coordinates of original position `j` occupy positions `j*m .. (j+1)*m`.
pub fn expand(c: &LinearCode, emb: &SubfieldEmbedding) -> Result<Transformed> {
    nonzero(c)?;
    c.field().ensure_same(emb.big())?;
    let big = emb.big();
    let m = emb.degree();
    let (n, k) = (c.len(), c.dim());
    let g = c.generator();
    let mut rows = Vec::with_capacity(m * k);
    for r in 0..k {
        for &b in emb.basis() {
            let mut row = Vec::with_capacity(m * n);
            for &x in g.row(r) {
                row.extend(emb.expand_element(big.mul(b, x))?);
            }
            rows.push(row);
        }
    }
    let generator = Matrix::from_rows(emb.small(), &rows)?;
    let bound = DistanceBound { lo: c.distance().lo, hi: m * n };
    let mut t = finish(TransformKind::Expand, &[c], &generator, m * k, bound)?;
    t.record.basis = Some(emb.basis().to_vec());
    t.record.degree = Some(m);
    Ok(t)
}

/// Appends the overall parity symbol `c_{n+1} = -Σ c_i`.
pub fn extend(c: &LinearCode) -> Result<Transformed> {
    nonzero(c)?;
    let f = c.field();
    let g = c.generator();
    let rows: Vec<Vec<u32>> = (0..g.rows())
        .map(|r| {
            let mut row = g.row(r).to_vec();
            let sum = row.iter().fold(0, |acc, &x| f.add(acc, x));
            row.push(f.neg(sum));
            row
        })
        .collect();
    let generator = Matrix::from_rows(f, &rows)?;
    let d = c.distance();
    finish(TransformKind::Extend, &[c], &generator, c.dim(), DistanceBound { lo: d.lo, hi: d.hi + 1 })
}

/// Deletes coordinate `coord` (1-based). Fails if the dimension would drop,
/// which happens exactly when a weight-1 codeword is supported on `coord`.
pub fn puncture(c: &LinearCode, coord: usize) -> Result<Transformed> {
    nonzero(c)?;
    let n = c.len();
    if coord == 0 || coord > n {
        return Err(Error::InvalidArgument(format!("coordinate {coord} outside 1..={n}")));
    }
    if n == 1 {
        return Err(Error::InvalidArgument("cannot puncture a length-1 code".into()));
    }
    let keep: Vec<usize> = (0..n).filter(|&j| j != coord - 1).collect();
    let generator = c.generator().select_cols(&keep);
    if generator.rank() < c.dim() {
        return Err(Error::RankCondition(format!(
            "puncturing coordinate {coord} drops the dimension (a weight-1 codeword is supported there)"
        )));
    }
    let d = c.distance();
    let bound = DistanceBound { lo: d.lo.saturating_sub(1).max(1), hi: d.hi };
    let mut t = finish(TransformKind::Puncture, &[c], &generator, c.dim(), bound)?;
    t.record.coord = Some(coord);
    Ok(t)
}

/// `C1 ⊕ C2` with block-diagonal generator.
pub fn direct_sum(c1: &LinearCode, c2: &LinearCode) -> Result<Transformed> {
    nonzero(c1)?;
    nonzero(c2)?;
    let generator = c1.generator().block_diag(c2.generator())?;
    let (a, b) = (c1.distance(), c2.distance());
    let bound = DistanceBound { lo: a.lo.min(b.lo), hi: a.hi.min(b.hi) };
    finish(TransformKind::DirectSum, &[c1, c2], &generator, c1.dim() + c2.dim(), bound)
}

/// `{(u, u + v) : u ∈ C1, v ∈ C2}` for codes of equal length.
pub fn u_u_plus_v(c1: &LinearCode, c2: &LinearCode) -> Result<Transformed> {
    nonzero(c1)?;
    nonzero(c2)?;
    c1.field().ensure_same(c2.field())?;
    if c1.len() != c2.len() {
        return Err(Error::DimensionMismatch(format!(
            "(u|u+v) needs equal lengths, got {} and {}",
            c1.len(),
            c2.len()
        )));
    }
    let g1 = c1.generator();
    let top = g1.hstack(g1)?;
    let bottom = Matrix::zeros(c2.field(), c2.dim(), c2.len()).hstack(c2.generator())?;
    let generator = top.vstack(&bottom)?;
    let (a, b) = (c1.distance(), c2.distance());
    let bound = DistanceBound { lo: (2 * a.lo).min(b.lo), hi: (2 * a.hi).min(b.hi) };
    finish(TransformKind::UUPlusV, &[c1, c2], &generator, c1.dim() + c2.dim(), bound)
}

/// Product code with generator `G1 ⊗ G2`; parameters `[n1 n2, k1 k2, d1 d2]`.
pub fn product(c1: &LinearCode, c2: &LinearCode) -> Result<Transformed> {
    nonzero(c1)?;
    nonzero(c2)?;
    let n = c1.len() * c2.len();
    if n > MAX_PRODUCT_LENGTH {
        return Err(Error::guard("product length", n, MAX_PRODUCT_LENGTH as u64));
    }
    let generator = c1.generator().kronecker(c2.generator())?;
    let (a, b) = (c1.distance(), c2.distance());
    let bound = DistanceBound { lo: a.lo * b.lo, hi: a.hi * b.hi };
    finish(TransformKind::Product, &[c1, c2], &generator, c1.dim() * c2.dim(), bound)
}

/// Euclidean dual as a recorded transform. The dual must be nonzero.
pub fn dual(c: &LinearCode) -> Result<Transformed> {
    nonzero(c)?;
    if c.is_full() {
        return Err(Error::ZeroCode);
    }
    let n = c.len();
    let k = n - c.dim();
    finish(TransformKind::Dual, &[c], c.parity_check(), k, DistanceBound { lo: 1, hi: n - k + 1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blockcode::{cyclic_from_generator_poly, random_code, weight};
    use crate::galois::Field;
    use crate::Guards;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gf(p: u32, e: u32) -> Field {
        Field::new(p, e, None).unwrap()
    }

    fn exact(c: LinearCode) -> LinearCode {
        c.with_exact_distance(&Guards::default()).unwrap()
    }

    fn hamming74() -> LinearCode {
        exact(cyclic_from_generator_poly(&gf(2, 1), 7, &[1, 1, 0, 1]).unwrap().with_name("hamming74"))
    }

    fn repetition(f: &Field, n: usize) -> LinearCode {
        exact(LinearCode::from_generator(&Matrix::from_rows(f, &[vec![1; n]]).unwrap()).unwrap())
    }

    fn min_d(c: &LinearCode) -> usize {
        c.min_distance(&Guards::default()).unwrap()
    }

    #[test]
    fn extend_hamming() {
        let t = extend(&hamming74()).unwrap();
        assert_eq!((t.code.len(), t.code.dim()), (8, 4));
        assert_eq!(min_d(&t.code), 4);
        assert!(t.code.is_self_dual());
        assert_eq!((t.record.d_lo, t.record.d_hi), (3, 4));
    }

    #[test]
    fn extend_keeps_distance_when_parity_vanishes() {
        let f = gf(2, 1);
        let t = extend(&repetition(&f, 2)).unwrap();
        assert_eq!(t.code.generator().row(0), &[1, 1, 0]);
        assert_eq!(min_d(&t.code), 2);
        let even = exact(LinearCode::from_generator(&Matrix::from_rows(&f, &[vec![1, 1, 0, 0], vec![0, 1, 1, 0], vec![0, 0, 1, 1]]).unwrap()).unwrap());
        assert_eq!(min_d(&even), 2);
        let t = extend(&even).unwrap();
        assert_eq!((t.code.len(), t.code.dim(), min_d(&t.code)), (5, 3, 2));
    }

    #[test]
    fn puncture_cases() {
        let t = puncture(&hamming74(), 7).unwrap();
        assert_eq!((t.code.len(), t.code.dim(), min_d(&t.code)), (6, 4, 2));
        assert_eq!(t.record.coord, Some(7));
        let f = gf(3, 1);
        let t = puncture(&repetition(&f, 5), 2).unwrap();
        assert_eq!((t.code.len(), t.code.dim(), min_d(&t.code)), (4, 1, 4));
        // a weight-1 codeword on the punctured coordinate
        let c = exact(LinearCode::from_generator(&Matrix::from_rows(&f, &[vec![1, 0, 0], vec![0, 1, 1]]).unwrap()).unwrap());
        assert!(matches!(puncture(&c, 1), Err(Error::RankCondition(_))));
        assert!(puncture(&c, 0).is_err());
    }

    #[test]
    fn puncture_away_from_minimum_weight_support() {
        // {0000, 1100, 0011, 1111} plus a coordinate outside every weight-2 word
        let f = gf(2, 1);
        let c = exact(LinearCode::from_generator(&Matrix::from_rows(&f, &[vec![1, 1, 0, 0, 1, 1, 1], vec![0, 0, 1, 1, 1, 1, 1]]).unwrap()).unwrap());
        assert_eq!(min_d(&c), 4);
        // the only minimum-weight word is 1111000
        let t = puncture(&c, 7).unwrap();
        assert_eq!(min_d(&t.code), 4);
        let t = puncture(&c, 1).unwrap();
        assert_eq!(min_d(&t.code), 3);
    }

    #[test]
    fn direct_sums() {
        let f = gf(2, 1);
        let t = direct_sum(&repetition(&f, 3), &repetition(&f, 3)).unwrap();
        assert_eq!((t.code.len(), t.code.dim(), min_d(&t.code)), (6, 2, 3));
        let h = hamming74();
        let s = exact(h.dual());
        let t = direct_sum(&h, &s).unwrap();
        assert_eq!((t.code.len(), t.code.dim(), min_d(&t.code)), (14, 7, 3));
        assert_eq!(direct_sum(&h, &LinearCode::zero(&f, 3)).unwrap_err(), Error::ZeroCode);
        assert!(matches!(direct_sum(&h, &repetition(&gf(3, 1), 3)), Err(Error::FieldMismatch(..))));
    }

    #[test]
    fn u_u_plus_v_cases() {
        let f = gf(2, 1);
        let full = exact(LinearCode::from_generator(&Matrix::identity(&f, 2)).unwrap());
        let t = u_u_plus_v(&full, &repetition(&f, 2)).unwrap();
        assert_eq!((t.code.len(), t.code.dim(), min_d(&t.code)), (4, 3, 2));
        let even = exact(LinearCode::from_generator(&Matrix::from_rows(&f, &[vec![1, 1, 0, 0], vec![0, 1, 1, 0], vec![0, 0, 1, 1]]).unwrap()).unwrap());
        let t = u_u_plus_v(&repetition(&f, 4), &even).unwrap();
        assert_eq!((t.code.len(), t.code.dim(), min_d(&t.code)), (8, 4, 2));
        // v = 0 slice duplicates u
        let u = vec![1u32; 8];
        assert!(t.code.contains(&u));
        assert_eq!(weight(&u), 8);
        assert!(u_u_plus_v(&full, &repetition(&f, 3)).is_err());
    }

    #[test]
    fn products() {
        let f = gf(2, 1);
        let even3 = exact(LinearCode::from_generator(&Matrix::from_rows(&f, &[vec![1, 1, 0], vec![0, 1, 1]]).unwrap()).unwrap());
        let t = product(&even3, &even3).unwrap();
        assert_eq!((t.code.len(), t.code.dim(), min_d(&t.code)), (9, 4, 4));
        assert!(t.code.distance().is_exact());
        let t = product(&repetition(&f, 3), &repetition(&f, 4)).unwrap();
        assert_eq!((t.code.len(), t.code.dim(), min_d(&t.code)), (12, 1, 12));
        let t = product(&hamming74(), &repetition(&f, 3)).unwrap();
        assert_eq!((t.code.len(), t.code.dim()), (21, 4));
        assert_eq!(t.code.distance(), DistanceBound::exact(9));
        let fresh = LinearCode::from_generator(t.code.generator()).unwrap();
        assert_eq!(min_d(&fresh), 9);
    }

    #[test]
    fn expand_reed_solomon_over_gf16() {
        let small = gf(2, 2);
        let emb = SubfieldEmbedding::new(&small, 2, None).unwrap();
        let big = emb.big();
        let points = [0u32, 1, 2, 3];
        let rows: Vec<Vec<u32>> = (0..2).map(|i| points.iter().map(|&x| big.pow(x, i)).collect()).collect();
        let rs = exact(LinearCode::from_generator(&Matrix::from_rows(big, &rows).unwrap()).unwrap());
        assert_eq!(min_d(&rs), 3);
        let t = expand(&rs, &emb).unwrap();
        assert_eq!((t.code.len(), t.code.dim()), (8, 4));
        let d = LinearCode::from_generator(t.code.generator()).unwrap();
        let d = min_d(&d);
        assert!(d >= 3 && t.record.d_lo == 3);
        // every expanded codeword comes from a codeword of the original code
        for msg in 0..(4u32.pow(4)) {
            let u: Vec<u32> = (0..4).map(|i| (msg >> (2 * i)) & 3).collect();
            let w = t.code.encode(&u);
            let orig: Vec<u32> = w.chunks(2).map(|c| emb.recombine(c).unwrap()).collect();
            assert!(rs.contains(&orig));
        }
        assert!(matches!(expand(&hamming74(), &emb), Err(Error::FieldMismatch(..))));
    }

    #[test]
    fn expand_gf4_to_gf2_doubles_parameters() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let big = gf(2, 2);
        let emb = SubfieldEmbedding::with_big_field(&gf(2, 1), &big, None).unwrap();
        for (n, k) in [(5, 2), (6, 3), (4, 1)] {
            let c = random_code(&big, n, k, &mut rng).unwrap();
            let t = expand(&c, &emb).unwrap();
            assert_eq!((t.code.len(), t.code.dim()), (2 * n, 2 * k));
        }
    }

    #[test]
    fn puncture_after_extend_recovers_hamming() {
        let h = hamming74();
        let back = puncture(&extend(&h).unwrap().code, 8).unwrap().code;
        assert_eq!(back.generator(), h.generator());
    }

    #[test]
    fn associativity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = gf(3, 1);
        let a = random_code(&f, 3, 2, &mut rng).unwrap();
        let b = random_code(&f, 2, 1, &mut rng).unwrap();
        let c = random_code(&f, 3, 1, &mut rng).unwrap();
        let l = direct_sum(&direct_sum(&a, &b).unwrap().code, &c).unwrap().code;
        let r = direct_sum(&a, &direct_sum(&b, &c).unwrap().code).unwrap().code;
        assert_eq!(l.generator(), r.generator());
        let l = product(&product(&a, &b).unwrap().code, &c).unwrap().code;
        let r = product(&a, &product(&b, &c).unwrap().code).unwrap().code;
        assert_eq!(l.generator(), r.generator());
    }
}
