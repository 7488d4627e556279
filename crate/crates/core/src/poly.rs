//! Univariate polynomials over a [`Field`] and the matrix routines the
//! convolutional layer needs: fraction-free determinants and Smith form.

use crate::galois::Field;

/// Polynomial with coefficients low to high; the zero polynomial is empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly(Vec<u32>);

impl Poly {
    pub fn zero() -> Poly {
        Poly(Vec::new())
    }

    pub fn one() -> Poly {
        Poly(vec![1])
    }

    pub fn constant(c: u32) -> Poly {
        Poly::from_coeffs(vec![c])
    }

    /// `c * D^k`.
    pub fn monomial(c: u32, k: usize) -> Poly {
        let mut v = vec![0; k + 1];
        v[k] = c;
        Poly::from_coeffs(v)
    }

    pub fn from_coeffs(mut coeffs: Vec<u32>) -> Poly {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly(coeffs)
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.0
    }

    /// Coefficient of `D^i`.
    pub fn coeff(&self, i: usize) -> u32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    /// Nonzero constant.
    pub fn is_unit(&self) -> bool {
        self.0.len() == 1
    }

    pub fn lead(&self) -> u32 {
        self.0.last().copied().unwrap_or(0)
    }

    pub fn add(&self, other: &Poly, f: &Field) -> Poly {
        let len = self.0.len().max(other.0.len());
        Poly::from_coeffs((0..len).map(|i| f.add(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn sub(&self, other: &Poly, f: &Field) -> Poly {
        let len = self.0.len().max(other.0.len());
        Poly::from_coeffs((0..len).map(|i| f.sub(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn neg(&self, f: &Field) -> Poly {
        Poly(self.0.iter().map(|&c| f.neg(c)).collect())
    }

    pub fn scale(&self, c: u32, f: &Field) -> Poly {
        Poly::from_coeffs(self.0.iter().map(|&x| f.mul(c, x)).collect())
    }

    pub fn mul(&self, other: &Poly, f: &Field) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![0u32; self.0.len() + other.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.0.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Poly::from_coeffs(out)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn divrem(&self, d: &Poly, f: &Field) -> (Poly, Poly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let inv = f.inv(d.lead()).expect("leading coefficient is nonzero");
        let mut r = self.0.clone();
        if r.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut q = vec![0u32; r.len() - dd];
        for top in (dd..r.len()).rev() {
            let c = f.mul(r[top], inv);
            if c == 0 {
                continue;
            }
            q[top - dd] = c;
            for (i, &di) in d.0.iter().enumerate() {
                let idx = top - dd + i;
                r[idx] = f.sub(r[idx], f.mul(c, di));
            }
        }
        (Poly::from_coeffs(q), Poly::from_coeffs(r))
    }

    pub fn monic(&self, f: &Field) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(f.inv(self.lead()).expect("nonzero lead"), f)
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(a: &Poly, b: &Poly, f: &Field) -> Poly {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let (_, r) = a.divrem(&b, f);
            a = b;
            b = r;
        }
        a.monic(f)
    }

    pub fn eval(&self, x: u32, f: &Field) -> u32 {
        self.0.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c))
    }
}

/// Determinant of a square polynomial matrix by fraction-free (Bareiss) elimination.
pub fn determinant(mut m: Vec<Vec<Poly>>, f: &Field) -> Poly {
    let n = m.len();
    if n == 0 {
        return Poly::one();
    }
    let mut negate = false;
    let mut prev = Poly::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    negate = !negate;
                }
                None => return Poly::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = m[i][j].mul(&m[k][k], f).sub(&m[i][k].mul(&m[k][j], f), f);
                let (q, r) = num.divrem(&prev, f);
                debug_assert!(r.is_zero(), "Bareiss division must be exact");
                m[i][j] = q;
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if negate {
        d.neg(f)
    } else {
        d
    }
}

/// Monic invariant factors of a polynomial matrix (the nonzero diagonal of its
/// Smith normal form). The length of the result is the rank.
pub fn smith_invariants(mut m: Vec<Vec<Poly>>, f: &Field) -> Vec<Poly> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    for t in 0..rows.min(cols) {
        loop {
            // pivot: nonzero entry of least degree in the trailing block
            let mut best: Option<(usize, usize, usize)> = None;
            for (i, row) in m.iter().enumerate().skip(t) {
                for (j, p) in row.iter().enumerate().skip(t) {
                    if let Some(d) = p.degree() {
                        if best.map_or(true, |(_, _, bd)| d < bd) {
                            best = Some((i, j, d));
                        }
                    }
                }
            }
            let Some((pi, pj, _)) = best else {
                return out;
            };
            m.swap(t, pi);
            for row in m.iter_mut() {
                row.swap(t, pj);
            }
            let pivot = m[t][t].clone();
            let mut clean = true;
            for i in t + 1..rows {
                if m[i][t].is_zero() {
                    continue;
                }
                let (q, r) = m[i][t].divrem(&pivot, f);
                for j in t..cols {
                    let v = m[i][j].sub(&q.mul(&m[t][j], f), f);
                    m[i][j] = v;
                }
                if !r.is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                if m[t][j].is_zero() {
                    continue;
                }
                let (q, r) = m[t][j].divrem(&pivot, f);
                for row in m.iter_mut().skip(t) {
                    let v = row[j].sub(&q.mul(&row[t], f), f);
                    row[j] = v;
                }
                if !r.is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // the pivot must divide every remaining entry
            let bad = (t + 1..rows).find(|&i| {
                (t + 1..cols).any(|j| !m[i][j].divrem(&pivot, f).1.is_zero())
            });
            match bad {
                Some(i) => {
                    for j in t..cols {
                        let v = m[t][j].add(&m[i][j], f);
                        m[t][j] = v;
                    }
                }
                None => break,
            }
        }
        out.push(m[t][t].monic(f));
    }
    out
}
