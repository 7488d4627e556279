//! Polynomial generator matrices and convolutional codes built from block codes.
//!
//! A parity-check matrix `H` is split into row blocks `H_0, ..., H_m`; the
//! blocks below `H_0` are padded with zero rows to the height of `H_0` and
//! summed as `G(D) = H̃_0 + H̃_1 D + ... + H̃_m D^m`. When `H_0` has the most
//! rows the result is always basic and reduced, and the free distance of the
//! generated code is at least the minimum distance of the code whose parity
//! check is `H`. The unit-memory builder applies this to the generator of a
//! block code `C` (a parity check of `C⊥`), so its free distance is at least
//! `d(C)`.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::blockcode::{weight, LinearCode};
use crate::galois::Field;
use crate::matrix::Matrix;
use crate::poly::{determinant, smith_invariants, Poly};
use crate::{checked_pow, Error, Guards, Result};

/// `G(D) = Σ_t A_t D^t` with every `A_t` of shape `rows × cols`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyMatrix {
    field: Field,
    rows: usize,
    cols: usize,
    coeffs: Vec<Matrix>,
}

impl PolyMatrix {
    /// Trailing zero coefficient matrices are dropped, so `memory()` is tight.
    pub fn new(coeffs: Vec<Matrix>) -> Result<PolyMatrix> {
        let first = coeffs
            .first()
            .ok_or_else(|| Error::InvalidArgument("a polynomial matrix needs A_0".into()))?;
        let (field, rows, cols) = (first.field().clone(), first.rows(), first.cols());
        for a in &coeffs {
            a.field().ensure_same(&field)?;
            if a.rows() != rows || a.cols() != cols {
                return Err(Error::DimensionMismatch("coefficient matrices differ in shape".into()));
            }
        }
        let mut coeffs = coeffs;
        while coeffs.len() > 1 && coeffs.last().is_some_and(Matrix::is_zero) {
            coeffs.pop();
        }
        Ok(PolyMatrix { field, rows, cols, coeffs })
    }

    pub fn from_entries(field: &Field, entries: &[Vec<Poly>]) -> Result<PolyMatrix> {
        let rows = entries.len();
        let cols = entries.first().map_or(0, Vec::len);
        let deg = entries.iter().flatten().filter_map(Poly::degree).max().unwrap_or(0);
        let mut coeffs = vec![Matrix::zeros(field, rows, cols); deg + 1];
        for (i, row) in entries.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::DimensionMismatch("ragged rows".into()));
            }
            for (j, p) in row.iter().enumerate() {
                for (t, &c) in p.coeffs().iter().enumerate() {
                    coeffs[t].set(i, j, field.check(c)?);
                }
            }
        }
        PolyMatrix::new(coeffs)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Coefficient matrices `A_0, ..., A_m`.
    pub fn coeffs(&self) -> &[Matrix] {
        &self.coeffs
    }

    pub fn memory(&self) -> usize {
        self.row_degrees().into_iter().flatten().max().unwrap_or(0)
    }

    pub fn entry(&self, i: usize, j: usize) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|a| a.get(i, j)).collect())
    }

    pub fn entries(&self) -> Vec<Vec<Poly>> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.entry(i, j)).collect()).collect()
    }

    /// Row degrees; `None` marks an all-zero row.
    pub fn row_degrees(&self) -> Vec<Option<usize>> {
        (0..self.rows)
            .map(|i| (0..self.coeffs.len()).rev().find(|&t| self.coeffs[t].row(i).iter().any(|&x| x != 0)))
            .collect()
    }

    /// Sum of the row degrees.
    pub fn external_degree(&self) -> Result<usize> {
        self.row_degrees()
            .into_iter()
            .map(|d| d.ok_or(Error::RankDeficient))
            .sum()
    }

    /// Row `i` is the coefficient of `D^{γ_i}` in row `i` of `G(D)`.
    pub fn leading_row_matrix(&self) -> Result<Matrix> {
        let mut out = Matrix::zeros(&self.field, self.rows, self.cols);
        for (i, d) in self.row_degrees().into_iter().enumerate() {
            let d = d.ok_or(Error::RankDeficient)?;
            for j in 0..self.cols {
                out.set(i, j, self.coeffs[d].get(i, j));
            }
        }
        Ok(out)
    }

    /// Multiplies row `i` by a nonzero constant.
    pub fn scale_row(&self, i: usize, c: u32) -> Result<PolyMatrix> {
        if c == 0 {
            return Err(Error::InvalidArgument("scaling by zero".into()));
        }
        let mut coeffs = self.coeffs.clone();
        for a in &mut coeffs {
            for j in 0..self.cols {
                let v = self.field.mul(c, a.get(i, j));
                a.set(i, j, v);
            }
        }
        PolyMatrix::new(coeffs)
    }

    /// Output `u(D) G(D)` for an input sequence of blocks `u_0, u_1, ...`.
    pub fn encode(&self, input: &[Vec<u32>]) -> Vec<Vec<u32>> {
        if input.is_empty() {
            return Vec::new();
        }
        let f = &self.field;
        let m = self.coeffs.len() - 1;
        (0..input.len() + m)
            .map(|t| {
                let mut v = vec![0u32; self.cols];
                for (j, a) in self.coeffs.iter().enumerate() {
                    if j > t || t - j >= input.len() {
                        continue;
                    }
                    for (o, x) in v.iter_mut().zip(a.vec_mul(&input[t - j])) {
                        *o = f.add(*o, x);
                    }
                }
                v
            })
            .collect()
    }
}

fn binomial(n: usize, k: usize) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// Visits every `k`-subset of `0..n` in lexicographic order until `visit` returns false.
fn for_each_combination(n: usize, k: usize, mut visit: impl FnMut(&[usize]) -> bool) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if !visit(&idx) {
            return;
        }
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn minor(entries: &[Vec<Poly>], cols: &[usize]) -> Vec<Vec<Poly>> {
    entries.iter().map(|row| cols.iter().map(|&c| row[c].clone()).collect()).collect()
}

/// Basicness through the gcd of all maximal minors.
pub fn is_basic_by_minors(g: &PolyMatrix, guards: &Guards) -> Result<bool> {
    let (k, n) = (g.rows(), g.cols());
    if k > n {
        return Err(Error::RankDeficient);
    }
    let count = binomial(n, k).unwrap_or(u64::MAX);
    if count > guards.max_minors {
        return Err(Error::guard("maximal minors", count, guards.max_minors));
    }
    let f = g.field();
    let entries = g.entries();
    let mut acc = Poly::zero();
    for_each_combination(n, k, |cols| {
        let det = determinant(minor(&entries, cols), f);
        acc = Poly::gcd(&acc, &det, f);
        !acc.is_unit()
    });
    if acc.is_zero() {
        return Err(Error::RankDeficient);
    }
    Ok(acc.is_unit())
}

/// Basicness through the Smith normal form: every invariant factor is a unit.
pub fn is_basic_by_smith(g: &PolyMatrix) -> Result<bool> {
    let inv = smith_invariants(g.entries(), g.field());
    if inv.len() < g.rows() {
        return Err(Error::RankDeficient);
    }
    Ok(inv.iter().all(Poly::is_unit))
}

/// True iff `G(D)` has a polynomial right inverse. Uses maximal minors while
/// their count is within `guards.max_minors`, the Smith form otherwise.
pub fn is_basic(g: &PolyMatrix, guards: &Guards) -> Result<bool> {
    match is_basic_by_minors(g, guards) {
        Err(Error::GuardExceeded { .. }) => is_basic_by_smith(g),
        r => r,
    }
}

/// True iff the leading-row-coefficient matrix has full row rank.
pub fn is_reduced(g: &PolyMatrix) -> Result<bool> {
    let lead = g.leading_row_matrix()?;
    Ok(lead.rank() == g.rows())
}

/// Largest degree among the maximal minors (the internal degree).
pub fn max_minor_degree(g: &PolyMatrix, guards: &Guards) -> Result<usize> {
    let (k, n) = (g.rows(), g.cols());
    let count = binomial(n, k).unwrap_or(u64::MAX);
    if count > guards.max_minors {
        return Err(Error::guard("maximal minors", count, guards.max_minors));
    }
    let entries = g.entries();
    let mut best: Option<usize> = None;
    for_each_combination(n, k, |cols| {
        if let Some(d) = determinant(minor(&entries, cols), g.field()).degree() {
            best = Some(best.map_or(d, |b| b.max(d)));
        }
        true
    });
    best.ok_or(Error::RankDeficient)
}

/// Generalized Singleton bound `s` and `r = max(n, s)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingletonData {
    pub s: usize,
    pub r: usize,
}

/// `s = (n - k)(⌊γ/k⌋ + 1) + γ + 1` and `r = max(n, s)`.
pub fn generalized_singleton(n: usize, k: usize, gamma: usize) -> Result<SingletonData> {
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("need 1 <= k <= n, got n={n}, k={k}")));
    }
    let s = (n - k) * (gamma / k + 1) + gamma + 1;
    Ok(SingletonData { s, r: n.max(s) })
}

/// Splits `h` into consecutive row blocks of the given sizes and pads blocks
/// `1..` with zero rows to the height of block 0.
pub fn piret_split(h: &Matrix, counts: &[usize]) -> Result<Vec<Matrix>> {
    if counts.is_empty() || counts.iter().sum::<usize>() != h.rows() {
        return Err(Error::InvalidArgument(format!(
            "row counts {counts:?} do not partition {} rows",
            h.rows()
        )));
    }
    if h.rank() != h.rows() {
        return Err(Error::RankCondition("the matrix to split must have full row rank".into()));
    }
    let kappa = counts[0];
    if kappa == 0 {
        return Err(Error::RankCondition("block 0 must be nonempty".into()));
    }
    let mut parts = Vec::with_capacity(counts.len());
    let mut start = 0;
    for (i, &c) in counts.iter().enumerate() {
        let block = h.select_rows(&(start..start + c).collect::<Vec<_>>());
        // rows of a full-rank matrix are independent, so rank = row count
        if i > 0 && c > kappa {
            return Err(Error::RankCondition(format!(
                "block {i} has rank {c}, exceeding rank {kappa} of block 0"
            )));
        }
        let padded = block.vstack(&Matrix::zeros(h.field(), kappa - c, h.cols()))?;
        parts.push(padded);
        start += c;
    }
    Ok(parts)
}

/// `G(D) = Σ_t parts[t] D^t`, re-certified basic and reduced.
pub fn piret_generator(parts: &[Matrix], guards: &Guards) -> Result<PolyMatrix> {
    let g = PolyMatrix::new(parts.to_vec())?;
    if !is_basic(&g, guards)? {
        return Err(Error::Internal("split generator is not basic".into()));
    }
    if !is_reduced(&g)? {
        return Err(Error::Internal("split generator is not reduced".into()));
    }
    Ok(g)
}

/// Parameters `(n, k, γ; m, d_f)` plus the bounds kept alongside them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvParams {
    pub n: usize,
    pub k: usize,
    pub gamma: usize,
    pub memory: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub df_lb: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub df: Option<usize>,
    pub s: usize,
    pub r: usize,
}

/// A convolutional code with a certified basic, reduced generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvCode {
    generator: PolyMatrix,
    params: ConvParams,
    /// Generator-row order of the source block code, when built from one.
    pub row_order: Option<Vec<usize>>,
    pub source: Option<String>,
}

impl ConvCode {
    pub fn new(generator: PolyMatrix, guards: &Guards) -> Result<ConvCode> {
        if !is_basic(&generator, guards)? {
            return Err(Error::Uncertified("basic"));
        }
        if !is_reduced(&generator)? {
            return Err(Error::Uncertified("reduced"));
        }
        let gamma = generator.external_degree()?;
        let (n, k) = (generator.cols(), generator.rows());
        let SingletonData { s, r } = generalized_singleton(n, k, gamma)?;
        let params = ConvParams { n, k, gamma, memory: generator.memory(), df_lb: None, df: None, s, r };
        Ok(ConvCode { generator, params, row_order: None, source: None })
    }

    pub fn generator(&self) -> &PolyMatrix {
        &self.generator
    }

    pub fn params(&self) -> &ConvParams {
        &self.params
    }

    pub fn singleton(&self) -> SingletonData {
        SingletonData { s: self.params.s, r: self.params.r }
    }

    pub fn with_lower_bound(mut self, lb: usize) -> Result<Self> {
        if lb > self.params.s {
            return Err(Error::Internal(format!("lower bound {lb} exceeds the Singleton bound {}", self.params.s)));
        }
        self.params.df_lb = Some(lb);
        Ok(self)
    }

    /// Stores a free distance computed elsewhere after checking it against the bounds.
    pub fn with_recorded_free_distance(mut self, df: usize) -> Result<Self> {
        if df == 0 || df > self.params.s || self.params.df_lb.is_some_and(|lb| df < lb) {
            return Err(Error::InvalidArgument(format!(
                "free distance {df} outside [{:?}, {}]",
                self.params.df_lb, self.params.s
            )));
        }
        self.params.df = Some(df);
        Ok(self)
    }

    /// Computes and stores the exact free distance, checking it against the stored bounds.
    pub fn with_free_distance(mut self, guards: &Guards) -> Result<Self> {
        let fd = free_distance(&self.generator, guards)?;
        if fd.value > self.params.s || self.params.df_lb.is_some_and(|lb| fd.value < lb) {
            return Err(Error::Internal(format!(
                "free distance {} outside [{:?}, {}]",
                fd.value, self.params.df_lb, self.params.s
            )));
        }
        self.params.df = Some(fd.value);
        Ok(self)
    }
}

/// Unit-memory code from a block code `C = [n, k, d]`.
///
/// With `G` the generator of `C` (rows in `row_order`, canonical RREF order by
/// default), `G(D) = G* + L̃ D` where `G*` holds the first `k - γ0` rows and
/// `L̃` the last `γ0` rows followed by `k - 2γ0` zero rows. The result has
/// parameters `(n, k - γ0, γ0; 1, d_f)` with `d_f >= d`.
pub fn unit_memory_from_block(
    code: &LinearCode,
    gamma0: usize,
    row_order: Option<&[usize]>,
    guards: &Guards,
) -> Result<ConvCode> {
    if code.is_zero() {
        return Err(Error::ZeroCode);
    }
    if gamma0 == 0 {
        return Err(Error::InvalidArgument("gamma0 must be positive".into()));
    }
    let k = code.dim();
    if k < 2 * gamma0 {
        return Err(Error::RankCondition(format!(
            "k = {k} < 2*gamma0 = {}: cannot pad with k - 2*gamma0 zero rows",
            2 * gamma0
        )));
    }
    let order: Vec<usize> = match row_order {
        Some(o) => o.to_vec(),
        None => (0..k).collect(),
    };
    let g = code.generator_rows(&order)?;
    let parts = piret_split(&g, &[k - gamma0, gamma0])?;
    let generator = piret_generator(&parts, guards)?;
    let mut conv = ConvCode::new(generator, guards)?;
    if conv.params.gamma != gamma0 || conv.params.memory != 1 {
        return Err(Error::Internal("unit-memory construction changed the degree".into()));
    }
    let lb = match code.min_distance(guards) {
        Ok(d) => d,
        Err(Error::GuardExceeded { .. }) => code.distance().lo,
        Err(e) => return Err(e),
    };
    conv = conv.with_lower_bound(lb)?;
    conv.row_order = Some(order);
    conv.source = Some(code.name().to_string());
    Ok(conv)
}

/// Exact free distance with the number of input blocks of a minimizing codeword.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeDistance {
    pub value: usize,
    pub witness_len: usize,
}

/// Exact free distance of a generator with memory at most 1.
///
/// Rows of degree 1 carry the state (their previous input symbols); rows of
/// degree 0 are free inputs that only affect the current output block, so each
/// trellis edge weighs the minimum over those free inputs. The distance is the
/// lighter of a single block driven by free inputs alone and the shortest
/// path that leaves the zero state and returns to it.
pub fn free_distance(g: &PolyMatrix, guards: &Guards) -> Result<FreeDistance> {
    if g.memory() > 1 {
        return Err(Error::Unsupported(
            "exact free distance needs memory <= 1; use the truncated search".into(),
        ));
    }
    let f = g.field();
    let q = f.order() as usize;
    let n = g.cols();
    let degrees = g.row_degrees();
    if degrees.iter().any(Option::is_none) || g.rows() == 0 {
        return Err(Error::RankDeficient);
    }
    let mem_rows: Vec<usize> = (0..g.rows()).filter(|&i| degrees[i] == Some(1)).collect();
    let free_rows: Vec<usize> = (0..g.rows()).filter(|&i| degrees[i] == Some(0)).collect();
    let states = checked_pow(q as u64, mem_rows.len())
        .filter(|&s| s <= guards.max_states)
        .ok_or_else(|| Error::guard("trellis states", format!("{q}^{}", mem_rows.len()), guards.max_states))?
        as usize;
    checked_pow(q as u64, free_rows.len())
        .filter(|&c| c <= guards.max_cosets)
        .ok_or_else(|| Error::guard("free-input cosets", format!("{q}^{}", free_rows.len()), guards.max_cosets))?;

    let a0 = &g.coeffs()[0];
    let a1 = g.coeffs().get(1).cloned().unwrap_or_else(|| Matrix::zeros(f, g.rows(), n));
    // generator vectors: free rows of A_0, then memory rows of A_0 (next state),
    // then memory rows of A_1 (current state)
    let mut gens: Vec<Vec<u32>> = free_rows.iter().map(|&i| a0.row(i).to_vec()).collect();
    gens.extend(mem_rows.iter().map(|&i| a0.row(i).to_vec()));
    gens.extend(mem_rows.iter().map(|&i| a1.row(i).to_vec()));
    let nf = free_rows.len();
    let nm = mem_rows.len();
    let mut place = vec![0i64; gens.len()];
    let mut scale = 1i64;
    for p in place.iter_mut().skip(nf) {
        *p = scale;
        scale *= q as i64;
    }
    let scaled: Vec<Vec<Vec<u32>>> = gens
        .iter()
        .map(|v| f.elements().map(|c| v.iter().map(|&x| f.mul(c, x)).collect()).collect())
        .collect();
    let support: Vec<Vec<usize>> = gens.iter().map(|v| (0..n).filter(|&c| v[c] != 0).collect()).collect();

    // edge[next + states * prev] = minimum block weight over the free inputs
    let mut edge = vec![usize::MAX; states * states];
    let mut d_zero = usize::MAX;
    let mut word = vec![0u32; n];
    let mut wt = 0usize;
    let mut digits = vec![0usize; gens.len()];
    let mut pair = 0i64;
    edge[0] = 0;
    let total = q.pow(gens.len() as u32);
    for t in 1..total {
        let mut i = 0;
        let mut tt = t;
        while tt % q == 0 {
            tt /= q;
            i += 1;
        }
        let old = digits[i];
        let new = (old + 1) % q;
        digits[i] = new;
        pair += (new as i64 - old as i64) * place[i];
        let delta = f.sub(new as u32, old as u32);
        let add = &scaled[i][delta as usize];
        for &c in &support[i] {
            let before = word[c];
            let after = f.add(before, add[c]);
            word[c] = after;
            match (before == 0, after == 0) {
                (true, false) => wt += 1,
                (false, true) => wt -= 1,
                _ => {}
            }
        }
        let slot = &mut edge[pair as usize];
        if wt < *slot {
            *slot = wt;
        }
        if pair == 0 && wt > 0 && wt < d_zero {
            d_zero = wt;
        }
    }

    let mut d_loop: Option<(usize, usize)> = None;
    if nm > 0 {
        // Dijkstra over nonzero states, keyed by (weight, edges)
        let mut dist = vec![(usize::MAX, usize::MAX); states];
        let mut heap = BinaryHeap::new();
        for s in 1..states {
            dist[s] = (edge[s], 1);
            heap.push(Reverse((edge[s], 1usize, s)));
        }
        let mut done = vec![false; states];
        while let Some(Reverse((w, len, s))) = heap.pop() {
            if done[s] || (w, len) != dist[s] {
                continue;
            }
            done[s] = true;
            for next in 1..states {
                let cand = (w + edge[next + states * s], len + 1);
                if cand < dist[next] {
                    dist[next] = cand;
                    heap.push(Reverse((cand.0, cand.1, next)));
                }
            }
        }
        for s in 1..states {
            let cand = (dist[s].0 + edge[states * s], dist[s].1 + 1);
            if d_loop.is_none_or(|b| cand < b) {
                d_loop = Some(cand);
            }
        }
    }

    let best = match (d_zero, d_loop) {
        (usize::MAX, None) => return Err(Error::Internal("generator has no nonzero codeword".into())),
        (d, None) => (d, 1),
        (usize::MAX, Some(l)) => l,
        (d, Some(l)) => {
            if d <= l.0 {
                (d, 1)
            } else {
                l
            }
        }
    };
    if best.0 == 0 {
        return Err(Error::Internal("zero-weight path leaves and re-enters the zero state".into()));
    }
    Ok(FreeDistance { value: best.0, witness_len: best.1 })
}

/// Minimum output weight over all inputs of at most `horizon` blocks with a
/// nonzero first block, by direct encoding. Valid for any memory; it is an
/// upper bound on `d_f` in general and equals it once `horizon` reaches the
/// length of a minimizing input.
pub fn free_distance_truncated(g: &PolyMatrix, horizon: usize, guards: &Guards) -> Result<usize> {
    if horizon == 0 {
        return Err(Error::InvalidArgument("horizon 0 leaves no nonzero input".into()));
    }
    let f = g.field();
    let q = f.order() as u64;
    let kappa = g.rows();
    let needed = checked_pow(q, kappa * horizon);
    if needed.is_none_or(|c| c > guards.max_truncation) {
        return Err(Error::guard("truncated enumeration", format!("{q}^{}", kappa * horizon), guards.max_truncation));
    }
    let inputs = q.pow(kappa as u32) as usize;
    let m = g.coeffs().len() - 1;
    let n = g.cols();
    let unpack = |idx: usize| -> Vec<u32> {
        let mut t = idx;
        (0..kappa)
            .map(|_| {
                let d = (t % q as usize) as u32;
                t /= q as usize;
                d
            })
            .collect()
    };
    // products[j][u] = u A_j
    let products: Vec<Vec<Vec<u32>>> = g
        .coeffs()
        .iter()
        .map(|a| (0..inputs).map(|u| a.vec_mul(&unpack(u))).collect())
        .collect();

    struct Search<'a> {
        f: &'a Field,
        products: Vec<Vec<Vec<u32>>>,
        inputs: usize,
        horizon: usize,
        m: usize,
        n: usize,
        best: usize,
        stack: Vec<usize>,
    }

    impl Search<'_> {
        fn block(&self, t: usize) -> usize {
            // weight of output block t given inputs on the stack (missing inputs are zero)
            let mut v = vec![0u32; self.n];
            for j in 0..=self.m {
                if j > t || t - j >= self.stack.len() {
                    continue;
                }
                let u = self.stack[t - j];
                if u == 0 {
                    continue;
                }
                for (o, &x) in v.iter_mut().zip(&self.products[j][u]) {
                    *o = self.f.add(*o, x);
                }
            }
            weight(&v)
        }

        fn run(&mut self, t: usize, partial: usize) {
            let start = if t == 0 { 1 } else { 0 };
            for u in start..self.inputs {
                self.stack.push(u);
                let w = partial + self.block(t);
                if w < self.best {
                    let tail: usize = (t + 1..=t + self.m).map(|s| self.block(s)).sum();
                    self.best = self.best.min(w + tail);
                    if t + 1 < self.horizon {
                        self.run(t + 1, w);
                    }
                }
                self.stack.pop();
            }
        }
    }

    let mut search = Search {
        f,
        products,
        inputs,
        horizon,
        m,
        n,
        best: usize::MAX,
        stack: Vec::with_capacity(horizon),
    };
    search.run(0, 0);
    Ok(search.best)
}
