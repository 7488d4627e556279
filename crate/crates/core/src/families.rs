//! Code families, construction pipelines and goodness reports.
//!
//! A [`FamilySpec`] names a sequence of block codes (BCH, Reed-Solomon,
//! Reed-Muller, a catalog of classical codes, or user files), a chain of
//! combinators applied to each member, and the degree `γ0` of the unit-memory
//! construction. [`family_report`] runs the whole pipeline and returns one
//! [`ReportRow`] per surviving index, with rates and distance ratios as exact
//! rationals. Indices whose code violates a precondition are listed with the
//! reason instead of aborting the run.
//!
//! The shipped families are constructible stand-ins. Nothing here claims they
//! are asymptotically good; the reports only check construction-level facts.

use std::fmt;
use std::path::PathBuf;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::blockcode::{cyclic_from_generator_poly, weight, DistanceBound, LinearCode, Transitivity};
use crate::combinators::{self, TransformRecord, Transformed};
use crate::convolutional::{generalized_singleton, unit_memory_from_block, ConvCode};
use crate::galois::{subfield_maps, Field, FieldSpec, SubfieldEmbedding};
use crate::matrix::Matrix;
use crate::poly::Poly;
use crate::{checked_pow, io, Error, Guards, Result};

/// Largest field GF(q^ord) a BCH construction may build.
const MAX_SPLITTING_FIELD: u64 = 1 << 16;
/// Largest Reed-Muller length.
const MAX_RM_LENGTH: usize = 1 << 12;

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Smallest `t >= 1` with `q^t = 1 (mod n)`, or `None` if `gcd(q, n) != 1`.
pub fn multiplicative_order(q: u64, n: u64) -> Option<u64> {
    if n == 0 || gcd(q, n) != 1 {
        return None;
    }
    if n == 1 {
        return Some(1);
    }
    let mut x = q % n;
    let mut t = 1;
    while x != 1 {
        x = x * q % n;
        t += 1;
    }
    Some(t)
}

/// The q-cyclotomic coset of `i` modulo `n`, sorted.
pub fn cyclotomic_coset(i: usize, q: usize, n: usize) -> Vec<usize> {
    let mut out = vec![i % n];
    let mut x = i * q % n;
    while x != i % n {
        out.push(x);
        x = x * q % n;
    }
    out.sort_unstable();
    out
}

/// Longest run of consecutive residues mod `n` contained in `set`.
fn longest_cyclic_run(set: &[bool]) -> usize {
    let n = set.len();
    if set.iter().all(|&b| b) {
        return n;
    }
    let mut best = 0;
    let mut run = 0;
    for i in 0..2 * n {
        if set[i % n] {
            run += 1;
            best = best.max(run);
        } else {
            run = 0;
        }
    }
    best.min(n)
}

/// Narrow-sense BCH code of length `n` and designed distance `designed` over `field`.
///
/// The generator polynomial has the zeros `β, β^2, ..., β^{designed-1}` and
/// their conjugates, `β` a primitive `n`-th root of unity in GF(q^ord). The
/// stored distance interval runs from the BCH bound of the full zero set to
/// the weight of the generator polynomial.
pub fn bch_code(field: &Field, n: usize, designed: usize) -> Result<LinearCode> {
    let q = field.order() as usize;
    if n < 2 || designed < 2 || designed > n {
        return Err(Error::InvalidArgument(format!("need 2 <= designed <= n, got n={n}, designed={designed}")));
    }
    let ord = multiplicative_order(q as u64, n as u64)
        .ok_or_else(|| Error::Unsupported(format!("length {n} is not coprime to q = {q}")))?;
    let big_order = checked_pow(q as u64, ord as usize).filter(|&o| o <= MAX_SPLITTING_FIELD);
    let Some(big_order) = big_order else {
        return Err(Error::Unsupported(format!("length {n} needs GF({q}^{ord}), above 2^16 elements")));
    };
    let (big, unlift) = if ord == 1 {
        (field.clone(), (0..q as u32).collect::<Vec<_>>())
    } else {
        let big = Field::new(field.characteristic(), field.degree() * ord as u32, None)?;
        let (_, unlift) = subfield_maps(field, &big)?;
        (big, unlift)
    };
    let beta = big.exp((big_order - 1) / n as u64);
    let mut zeros = vec![false; n];
    for i in 1..designed {
        for c in cyclotomic_coset(i, q, n) {
            zeros[c] = true;
        }
    }
    let mut g = Poly::one();
    for (i, _) in zeros.iter().enumerate().filter(|(_, &z)| z) {
        let root = big.pow(beta, i as u64);
        g = g.mul(&Poly::from_coeffs(vec![big.neg(root), 1]), &big);
    }
    let coeffs: Vec<u32> = g
        .coeffs()
        .iter()
        .map(|&c| match unlift[c as usize] {
            u32::MAX => Err(Error::Internal("BCH generator has a coefficient outside GF(q)".into())),
            a => Ok(a),
        })
        .collect::<Result<_>>()?;
    let k = n - (coeffs.len() - 1);
    if k == 0 {
        return Err(Error::Unsupported(format!("designed distance {designed} leaves no information symbols at n = {n}")));
    }
    let code = cyclic_from_generator_poly(field, n, &coeffs)?;
    let lo = (longest_cyclic_run(&zeros) + 1).max(designed);
    let hi = weight(&coeffs).min(n - k + 1);
    code.with_name(format!("bch[{n},{k}]/GF({q})")).with_distance_bound(DistanceBound { lo, hi })
}

/// Reed-Solomon `[n, k, n-k+1]` code. Cyclic (zeros `β, ..., β^{n-k}`) when
/// `n` divides `q - 1`, otherwise evaluation of polynomials of degree `< k`
/// at the field elements `0, 1, ..., n-1` (as encodings).
pub fn reed_solomon(field: &Field, n: usize, k: usize) -> Result<LinearCode> {
    let q = field.order() as usize;
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("need 1 <= k <= n, got n={n}, k={k}")));
    }
    let code = if (q - 1) % n == 0 {
        let beta = field.exp(((q - 1) / n) as u64);
        let mut g = Poly::one();
        for i in 1..=n - k {
            let root = field.pow(beta, i as u64);
            g = g.mul(&Poly::from_coeffs(vec![field.neg(root), 1]), field);
        }
        cyclic_from_generator_poly(field, n, g.coeffs())?
    } else if n <= q {
        let rows: Vec<Vec<u32>> = (0..k)
            .map(|i| (0..n as u32).map(|x| field.pow(x, i as u64)).collect())
            .collect();
        LinearCode::from_generator(&Matrix::from_rows(field, &rows)?)?
    } else {
        return Err(Error::Unsupported(format!("Reed-Solomon length {n} exceeds q = {q}")));
    };
    if code.dim() != k {
        return Err(Error::Internal("Reed-Solomon generator lost rank".into()));
    }
    code.with_name(format!("rs[{n},{k}]/GF({q})")).with_distance_bound(DistanceBound::exact(n - k + 1))
}

/// Binary Reed-Muller code `RM(r, m)`: `[2^m, Σ_{i<=r} C(m,i), 2^{m-r}]`.
/// Points are ordered by their integer value; monomials by degree, then lexicographically.
pub fn reed_muller(r: usize, m: usize) -> Result<LinearCode> {
    if r > m {
        return Err(Error::InvalidArgument(format!("RM({r}, {m}) needs r <= m")));
    }
    let n = 1usize << m;
    if n > MAX_RM_LENGTH {
        return Err(Error::guard("Reed-Muller length", n, MAX_RM_LENGTH as u64));
    }
    let f = Field::prime(2)?;
    let mut monomials: Vec<usize> = (0..n).filter(|s| s.count_ones() as usize <= r).collect();
    monomials.sort_by_key(|&s| (s.count_ones(), s));
    let rows: Vec<Vec<u32>> = monomials
        .iter()
        .map(|&s| (0..n).map(|x| u32::from(x & s == s)).collect())
        .collect();
    LinearCode::from_generator(&Matrix::from_rows(&f, &rows)?)?
        .with_name(format!("rm({r},{m})"))
        .with_distance_bound(DistanceBound::exact(1 << (m - r)))
}

/// Cyclic binary Hamming code of length `2^r - 1`.
pub fn hamming(r: usize) -> Result<LinearCode> {
    if !(2..=16).contains(&r) {
        return Err(Error::InvalidArgument(format!("Hamming redundancy {r} outside 2..=16")));
    }
    let n = (1usize << r) - 1;
    let code = bch_code(&Field::prime(2)?, n, 3)?;
    let k = code.dim();
    code.with_name(format!("hamming[{n},{k}]")).with_distance_bound(DistanceBound::exact(3))
}

pub fn repetition(field: &Field, n: usize) -> Result<LinearCode> {
    Ok(LinearCode::from_generator(&Matrix::from_rows(field, &[vec![1; n]])?)?.with_name(format!("repetition[{n}]")))
}

/// Codewords whose coordinates sum to zero.
pub fn even_weight(field: &Field, n: usize) -> Result<LinearCode> {
    if n < 2 {
        return Err(Error::InvalidArgument("even-weight code needs n >= 2".into()));
    }
    let minus_one = field.neg(1);
    let rows: Vec<Vec<u32>> = (0..n - 1)
        .map(|i| (0..n).map(|c| if c == i { 1 } else if c == n - 1 { minus_one } else { 0 }).collect())
        .collect();
    Ok(LinearCode::from_generator(&Matrix::from_rows(field, &rows)?)?.with_name(format!("even_weight[{n}]")))
}

/// Binary Golay code `[23, 12, 7]`.
pub fn golay23() -> Result<LinearCode> {
    let g = [1, 0, 1, 0, 1, 1, 1, 0, 0, 0, 1, 1];
    Ok(cyclic_from_generator_poly(&Field::prime(2)?, 23, &g)?.with_name("golay[23,12]"))
}

/// Ternary Golay code `[11, 6, 5]`.
pub fn golay11() -> Result<LinearCode> {
    let g = [2, 0, 1, 2, 1, 1];
    Ok(cyclic_from_generator_poly(&Field::prime(3)?, 11, &g)?.with_name("golay[11,6]/GF(3)"))
}

/// Extended binary Hamming code `[8, 4, 4]` (self-dual, not cyclic).
pub fn extended_hamming8() -> Result<LinearCode> {
    Ok(combinators::extend(&hamming(3)?)?.code.with_name("extended_hamming[8,4]"))
}

fn parse_param(name: &str, arg: Option<&str>) -> Result<usize> {
    arg.and_then(|a| a.parse().ok())
        .ok_or_else(|| Error::InvalidArgument(format!("catalog entry {name:?} needs a numeric parameter")))
}

/// Looks up a catalog entry: `hamming:r`, `golay23`, `golay11`,
/// `repetition:n`, `even_weight:n`, `extended_hamming8`. The optional field
/// applies to `repetition` and `even_weight` (binary by default).
pub fn catalog_code(name: &str, field: Option<&Field>) -> Result<LinearCode> {
    let (base, arg) = match name.split_once(':') {
        Some((b, a)) => (b, Some(a)),
        None => (name, None),
    };
    let binary = Field::prime(2)?;
    let field = field.unwrap_or(&binary);
    match base {
        "hamming" => hamming(parse_param(name, arg)?),
        "golay23" => golay23(),
        "golay11" => golay11(),
        "repetition" => repetition(field, parse_param(name, arg)?),
        "even_weight" => even_weight(field, parse_param(name, arg)?),
        "extended_hamming8" => extended_hamming8(),
        _ => Err(Error::InvalidArgument(format!("unknown catalog entry {name:?}"))),
    }
}

fn default_designed() -> usize {
    3
}

/// Where the block codes of a family come from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilySource {
    CyclicCatalog {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        field: Option<FieldSpec>,
        names: Vec<String>,
    },
    Bch {
        field: FieldSpec,
        lengths: Vec<usize>,
        #[serde(default = "default_designed")]
        designed_distance: usize,
    },
    ReedSolomon {
        field: FieldSpec,
        n: usize,
        dims: Vec<usize>,
    },
    ReedMuller {
        r: usize,
        ms: Vec<usize>,
    },
    UserFiles {
        paths: Vec<PathBuf>,
    },
}

/// One combinator in a pipeline. Binary operations combine a code with itself.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum TransformStep {
    Expand {
        subfield: FieldSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        basis: Option<Vec<u32>>,
    },
    Extend,
    /// Coordinate is 1-based; the last coordinate by default.
    Puncture {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        coord: Option<usize>,
    },
    #[serde(alias = "direct_sum")]
    Sum,
    #[serde(alias = "u_u_plus_v")]
    Uv,
    Product,
    Dual,
}

impl TransformStep {
    fn apply(&self, code: &LinearCode) -> Result<Transformed> {
        match self {
            TransformStep::Expand { subfield, basis } => {
                let small = Field::from_spec(subfield)?;
                let emb = SubfieldEmbedding::with_big_field(&small, code.field(), basis.clone())?;
                combinators::expand(code, &emb)
            }
            TransformStep::Extend => combinators::extend(code),
            TransformStep::Puncture { coord } => combinators::puncture(code, coord.unwrap_or(code.len())),
            TransformStep::Sum => combinators::direct_sum(code, code),
            TransformStep::Uv => combinators::u_u_plus_v(code, code),
            TransformStep::Product => combinators::product(code, code),
            TransformStep::Dual => combinators::dual(code),
        }
    }

    /// Block length and dimension the step produces from `(n, k)`.
    fn claim(&self, n: usize, k: usize, field_degree: u32) -> (usize, usize) {
        match self {
            TransformStep::Expand { subfield, .. } => {
                let m = (field_degree / subfield.e.max(1)) as usize;
                (m * n, m * k)
            }
            TransformStep::Extend => (n + 1, k),
            TransformStep::Puncture { .. } => (n - 1, k),
            TransformStep::Sum | TransformStep::Uv => (2 * n, 2 * k),
            TransformStep::Product => (n * n, k * k),
            TransformStep::Dual => (n, n - k),
        }
    }
}

/// Optional annotation line `R = 1 - δ - 1/(l - 1)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceSpec {
    pub l: u64,
    /// Relative distance as a fraction or decimal string, e.g. `"1/4"`.
    pub delta: String,
}

fn default_gamma0() -> usize {
    1
}

fn default_exact_limit() -> u64 {
    1 << 20
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySpec {
    #[serde(flatten)]
    pub source: FamilySource,
    #[serde(default)]
    pub transforms: Vec<TransformStep>,
    #[serde(default = "default_gamma0")]
    pub gamma0: usize,
    /// Block distances are computed exactly when `q^k` is at most this.
    #[serde(default = "default_exact_limit")]
    pub exact_limit: u64,
    /// Compute exact free distances where the trellis guards allow.
    #[serde(default = "default_true")]
    pub exact_df: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<ReferenceSpec>,
}

impl FamilySpec {
    pub fn new(source: FamilySource) -> FamilySpec {
        FamilySpec {
            source,
            transforms: Vec::new(),
            gamma0: 1,
            exact_limit: default_exact_limit(),
            exact_df: true,
            reference: None,
        }
    }

    fn guards(&self, base: &Guards) -> Guards {
        Guards { max_codewords: base.max_codewords.min(self.exact_limit), ..*base }
    }
}

/// A generated family member, or the reason it could not be built.
#[derive(Debug, Clone)]
pub struct Member {
    pub j: usize,
    pub label: String,
    pub code: std::result::Result<LinearCode, String>,
}

/// Caches the exact distance when the enumeration fits the guards.
fn settle_distance(code: LinearCode, guards: &Guards) -> Result<LinearCode> {
    match code.min_distance(guards) {
        Ok(d) => code.with_distance_bound(DistanceBound::exact(d)),
        Err(Error::GuardExceeded { .. }) => Ok(code),
        Err(e) => Err(e),
    }
}

/// Skips cover unsupported parameters and violated preconditions; anything
/// else is a genuine failure.
fn is_skip(e: &Error) -> bool {
    matches!(
        e,
        Error::Unsupported(_)
            | Error::RankCondition(_)
            | Error::GuardExceeded { .. }
            | Error::ZeroCode
            | Error::DimensionMismatch(_)
            | Error::InvalidArgument(_)
    )
}

/// Builds the family members in index order (starting at `j = 1`).
pub fn family_generate(spec: &FamilySpec, guards: &Guards) -> Result<Vec<Member>> {
    let guards = spec.guards(guards);
    let builders: Vec<(String, Box<dyn Fn() -> Result<LinearCode> + Send + Sync>)> = match &spec.source {
        FamilySource::CyclicCatalog { field, names } => {
            let field = field.as_ref().map(Field::from_spec).transpose()?;
            names
                .iter()
                .map(|name| {
                    let (name, field) = (name.clone(), field.clone());
                    let label = name.clone();
                    let b: Box<dyn Fn() -> Result<LinearCode> + Send + Sync> =
                        Box::new(move || catalog_code(&name, field.as_ref()));
                    (label, b)
                })
                .collect()
        }
        FamilySource::Bch { field, lengths, designed_distance } => {
            let field = Field::from_spec(field)?;
            let d = *designed_distance;
            lengths
                .iter()
                .map(|&n| {
                    let field = field.clone();
                    let b: Box<dyn Fn() -> Result<LinearCode> + Send + Sync> = Box::new(move || bch_code(&field, n, d));
                    (format!("bch n={n}"), b)
                })
                .collect()
        }
        FamilySource::ReedSolomon { field, n, dims } => {
            let field = Field::from_spec(field)?;
            let n = *n;
            dims.iter()
                .map(|&k| {
                    let field = field.clone();
                    let b: Box<dyn Fn() -> Result<LinearCode> + Send + Sync> =
                        Box::new(move || reed_solomon(&field, n, k));
                    (format!("rs n={n} k={k}"), b)
                })
                .collect()
        }
        FamilySource::ReedMuller { r, ms } => {
            let r = *r;
            ms.iter()
                .map(|&m| {
                    let b: Box<dyn Fn() -> Result<LinearCode> + Send + Sync> = Box::new(move || reed_muller(r, m));
                    (format!("rm({r},{m})"), b)
                })
                .collect()
        }
        FamilySource::UserFiles { paths } => paths
            .iter()
            .map(|p| {
                let p = p.clone();
                let label = p.display().to_string();
                let b: Box<dyn Fn() -> Result<LinearCode> + Send + Sync> = Box::new(move || io::read_code(&p));
                (label, b)
            })
            .collect(),
    };
    builders
        .par_iter()
        .enumerate()
        .map(|(i, (label, build))| {
            let code = match build().and_then(|c| settle_distance(c, &guards)) {
                Ok(c) => Ok(c),
                Err(e) if is_skip(&e) => Err(e.to_string()),
                Err(e) => return Err(e),
            };
            Ok(Member { j: i + 1, label: label.clone(), code })
        })
        .collect()
}

/// Structural certificates of a code, computed, never asserted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Labels {
    pub transitivity: Transitivity,
    pub self_orthogonal: bool,
    pub self_dual: bool,
}

impl Labels {
    pub fn certify(code: &LinearCode) -> Labels {
        Labels {
            transitivity: code.transitivity(),
            self_orthogonal: code.is_self_orthogonal(),
            self_dual: code.is_self_dual(),
        }
    }
}

impl fmt::Display for Labels {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = vec![match self.transitivity {
            Transitivity::Cyclic => "cyclic",
            Transitivity::Unknown => "transitivity_unknown",
        }];
        if self.self_orthogonal {
            parts.push("self_orthogonal");
        }
        if self.self_dual {
            parts.push("self_dual");
        }
        f.write_str(&parts.join(";"))
    }
}

/// Closed-form parameters a pipeline promises, compared with what it built.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Claims {
    pub block_n: usize,
    pub block_k: usize,
    /// `(n, k, γ, m)` of the convolutional code.
    pub conv: (usize, usize, usize, usize),
    pub s: usize,
    pub r: usize,
    pub holds: bool,
}

/// `s` in the shape the closed forms take: `n - k + 2γ0 + 1` while
/// `γ0 < k - γ0`, the general bound otherwise.
fn closed_form_s(n: usize, k: usize, gamma0: usize) -> usize {
    let kappa = k.saturating_sub(gamma0).max(1);
    if gamma0 < kappa {
        n - k + 2 * gamma0 + 1
    } else {
        (n - kappa) * (gamma0 / kappa + 1) + gamma0 + 1
    }
}

/// A family member after the combinator chain and the unit-memory build.
#[derive(Debug, Clone)]
pub struct PipelineRow {
    pub j: usize,
    pub source: String,
    pub block: LinearCode,
    pub records: Vec<TransformRecord>,
    pub conv: ConvCode,
    pub labels: Labels,
    pub claims: Claims,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Skipped {
    pub j: usize,
    pub source: String,
    pub reason: String,
}

fn run_member(code: &LinearCode, j: usize, source: &str, spec: &FamilySpec, guards: &Guards) -> Result<PipelineRow> {
    let (mut n, mut k) = (code.len(), code.dim());
    let mut current = code.clone();
    let mut records = Vec::with_capacity(spec.transforms.len());
    for step in &spec.transforms {
        (n, k) = step.claim(n, k, current.field().degree());
        let t = step.apply(&current)?;
        records.push(t.record);
        current = settle_distance(t.code, guards)?;
    }
    let mut conv = unit_memory_from_block(&current, spec.gamma0, None, guards)?;
    if spec.exact_df {
        conv = match conv.clone().with_free_distance(guards) {
            Ok(c) => c,
            Err(Error::GuardExceeded { .. }) => conv,
            Err(e) => return Err(e),
        };
    }
    let g0 = spec.gamma0;
    let s = closed_form_s(n, k, g0);
    let p = conv.params();
    let claims = Claims {
        block_n: n,
        block_k: k,
        conv: (n, k - g0, g0, 1),
        s,
        r: n.max(s),
        holds: (current.len(), current.dim()) == (n, k)
            && (p.n, p.k, p.gamma, p.memory) == (n, k - g0, g0, 1)
            && (p.s, p.r) == (s, n.max(s)),
    };
    Ok(PipelineRow {
        j,
        source: source.to_string(),
        labels: Labels::certify(&current),
        block: current,
        records,
        conv,
        claims,
    })
}

/// Applies the transform chain and the unit-memory construction to every
/// member. Members that violate a precondition are skipped with the reason.
pub fn apply_pipeline(
    members: &[Member],
    spec: &FamilySpec,
    guards: &Guards,
) -> Result<(Vec<PipelineRow>, Vec<Skipped>)> {
    let guards = spec.guards(guards);
    let outcomes: Vec<std::result::Result<PipelineRow, Skipped>> = members
        .par_iter()
        .map(|m| {
            let skip = |reason: String| Skipped { j: m.j, source: m.label.clone(), reason };
            match &m.code {
                Err(reason) => Ok(Err(skip(reason.clone()))),
                Ok(code) => match run_member(code, m.j, &m.label, spec, &guards) {
                    Ok(row) => Ok(Ok(row)),
                    Err(e) if is_skip(&e) => Ok(Err(skip(e.to_string()))),
                    Err(e) => Err(e),
                },
            }
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for o in outcomes {
        match o {
            Ok(r) => rows.push(r),
            Err(s) => skipped.push(s),
        }
    }
    Ok((rows, skipped))
}

/// A nonnegative fraction in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Frac {
    pub num: u64,
    pub den: u64,
}

impl From<Ratio<u64>> for Frac {
    fn from(r: Ratio<u64>) -> Frac {
        Frac { num: *r.numer(), den: *r.denom() }
    }
}

impl From<Frac> for Ratio<u64> {
    fn from(f: Frac) -> Ratio<u64> {
        Ratio::new(f.num, f.den)
    }
}

impl fmt::Display for Frac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Parses `"3/7"`, `"0.25"` or `"1"` exactly.
pub fn parse_fraction(s: &str) -> Result<Ratio<u64>> {
    let bad = || Error::InvalidArgument(format!("{s:?} is not a nonnegative fraction"));
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let (a, b): (u64, u64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
        if b == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(a, b));
    }
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if frac.len() > 18 || !frac.chars().all(|c| c.is_ascii_digit()) || (int.is_empty() && frac.is_empty()) {
        return Err(bad());
    }
    let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
    let den = 10u64.pow(frac.len() as u32);
    let fnum: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
    let num = int.checked_mul(den).and_then(|x| x.checked_add(fnum)).ok_or_else(bad)?;
    Ok(Ratio::new(num, den))
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRow {
    pub j: usize,
    pub n: usize,
    pub k: usize,
    pub gamma: usize,
    pub memory: usize,
    pub d_block_lo: usize,
    pub d_block_hi: usize,
    /// Exact minimum distance of the block code whose generator is split;
    /// it is the dual distance of the code the split matrix checks.
    pub d_dual: Option<usize>,
    pub df_lb: usize,
    pub df_exact: Option<usize>,
    pub s: usize,
    pub r: usize,
    pub rate_num: u64,
    pub rate_den: u64,
    pub ratio_num: u64,
    pub ratio_den: u64,
    pub labels: String,
}

impl ReportRow {
    pub fn rate(&self) -> Ratio<u64> {
        Ratio::new(self.rate_num, self.rate_den)
    }

    /// `d_f / r`, or `df_lb / r` when the exact free distance is unknown.
    pub fn ratio(&self) -> Ratio<u64> {
        Ratio::new(self.ratio_num, self.ratio_den)
    }
}

/// Per-row data that does not fit the CSV layout.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowDetail {
    pub j: usize,
    pub source: String,
    pub block: String,
    pub block_n: usize,
    pub block_k: usize,
    pub transforms: Vec<TransformRecord>,
    pub labels: Labels,
    pub claims: Claims,
    pub ratio_is_lower_bound: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedFrac {
    pub num: i64,
    pub den: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceLine {
    pub l: u64,
    pub delta: Frac,
    /// `1 - δ - 1/(l - 1)`.
    pub rate: SignedFrac,
}

impl ReferenceLine {
    pub fn new(spec: &ReferenceSpec) -> Result<ReferenceLine> {
        if spec.l < 2 {
            return Err(Error::InvalidArgument("reference needs l >= 2".into()));
        }
        let delta = parse_fraction(&spec.delta)?;
        let d = Ratio::new(*delta.numer() as i64, *delta.denom() as i64);
        let rate = Ratio::from_integer(1) - d - Ratio::new(1, spec.l as i64 - 1);
        Ok(ReferenceLine {
            l: spec.l,
            delta: delta.into(),
            rate: SignedFrac { num: *rate.numer(), den: *rate.denom() },
        })
    }
}

const STAND_IN_NOTE: &str =
    "families are constructible stand-ins; asymptotic optimality is not claimed, only construction-level facts are checked";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub rows: Vec<ReportRow>,
    pub details: Vec<RowDetail>,
    pub skipped: Vec<Skipped>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<ReferenceLine>,
    pub note: String,
}

/// Tabulates rates and distance ratios for a sequence of pipeline rows.
pub fn agcc_report(rows: &[PipelineRow]) -> Result<FamilyReport> {
    if rows.is_empty() {
        return Err(Error::InvalidArgument("a report needs at least one code".into()));
    }
    let mut out = Vec::with_capacity(rows.len());
    let mut details = Vec::with_capacity(rows.len());
    for row in rows {
        let p = row.conv.params();
        let d = row.block.distance();
        let df_lb = p.df_lb.unwrap_or(d.lo);
        let numerator = p.df.unwrap_or(df_lb);
        let rate = Ratio::new(p.k as u64, p.n as u64);
        let ratio = Ratio::new(numerator as u64, p.r as u64);
        let mut labels = row.labels.to_string();
        if p.df.is_none() {
            labels.push_str(";ratio_lb");
        }
        out.push(ReportRow {
            j: row.j,
            n: p.n,
            k: p.k,
            gamma: p.gamma,
            memory: p.memory,
            d_block_lo: d.lo,
            d_block_hi: d.hi,
            d_dual: d.value(),
            df_lb,
            df_exact: p.df,
            s: p.s,
            r: p.r,
            rate_num: *rate.numer(),
            rate_den: *rate.denom(),
            ratio_num: *ratio.numer(),
            ratio_den: *ratio.denom(),
            labels,
        });
        details.push(RowDetail {
            j: row.j,
            source: row.source.clone(),
            block: row.block.name().to_string(),
            block_n: row.block.len(),
            block_k: row.block.dim(),
            transforms: row.records.clone(),
            labels: row.labels,
            claims: row.claims.clone(),
            ratio_is_lower_bound: p.df.is_none(),
        });
    }
    Ok(FamilyReport { rows: out, details, skipped: Vec::new(), reference: None, note: STAND_IN_NOTE.to_string() })
}

/// Generates the family, runs the pipeline and tabulates the result.
pub fn family_report(spec: &FamilySpec, guards: &Guards) -> Result<FamilyReport> {
    let members = family_generate(spec, guards)?;
    let (rows, skipped) = apply_pipeline(&members, spec, guards)?;
    if rows.is_empty() {
        let reasons: Vec<String> = skipped.iter().map(|s| format!("j={}: {}", s.j, s.reason)).collect();
        return Err(Error::InvalidArgument(format!("every family member was skipped ({})", reasons.join("; "))));
    }
    let mut report = agcc_report(&rows)?;
    report.skipped = skipped;
    report.reference = spec.reference.as_ref().map(ReferenceLine::new).transpose()?;
    Ok(report)
}

impl FamilyReport {
    /// Internal-consistency failures, empty when the report is sound.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (row, detail) in self.rows.iter().zip(&self.details) {
            let j = row.j;
            match generalized_singleton(row.n, row.k, row.gamma) {
                Ok(sd) if (sd.s, sd.r) == (row.s, row.r) => {}
                Ok(sd) => out.push(format!("j={j}: stored (s, r) = ({}, {}), recomputed ({}, {})", row.s, row.r, sd.s, sd.r)),
                Err(e) => out.push(format!("j={j}: {e}")),
            }
            if row.d_block_lo > row.d_block_hi {
                out.push(format!("j={j}: empty block distance interval"));
            }
            if row.rate() != Ratio::new(row.k as u64, row.n as u64) {
                out.push(format!("j={j}: rate is not k/n"));
            }
            let numerator = row.df_exact.unwrap_or(row.df_lb);
            if row.ratio() != Ratio::new(numerator as u64, row.r as u64) {
                out.push(format!("j={j}: ratio does not match d_f / r"));
            }
            if let Some(df) = row.df_exact {
                if df > row.s || df < row.df_lb || row.d_dual.is_some_and(|d| df < d) {
                    out.push(format!("j={j}: free distance {df} outside [{}, {}]", row.df_lb, row.s));
                }
            }
            if row.df_lb < row.d_block_lo {
                out.push(format!("j={j}: lower bound below the block distance"));
            }
            if detail.j != j || !detail.claims.holds {
                out.push(format!("j={j}: closed-form claims {:?} do not hold", detail.claims));
            }
        }
        if self.rows.len() != self.details.len() {
            out.push("rows and details differ in length".into());
        }
        out
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            w.serialize(row).map_err(|e| Error::Internal(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Internal(e.to_string()))
    }
}

const TREND_NOTE: &str = "finite-prefix evidence, not a limit statement";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trend {
    pub rows: usize,
    pub rate_floor: Frac,
    pub ratio_floor: Frac,
    pub min_rate: Frac,
    pub min_ratio: Frac,
    pub rate_pass: bool,
    pub ratio_pass: bool,
    pub pass: bool,
    pub running_max_rate: Vec<Frac>,
    pub running_max_ratio: Vec<Frac>,
    pub note: String,
}

/// Compares the smallest rate and distance ratio of a report with floors in `(0, 1]`.
pub fn goodness_trend(report: &FamilyReport, rate_floor: Ratio<u64>, ratio_floor: Ratio<u64>) -> Result<Trend> {
    if report.rows.is_empty() {
        return Err(Error::InvalidArgument("empty report".into()));
    }
    for (name, f) in [("rate", rate_floor), ("ratio", ratio_floor)] {
        if f == Ratio::from_integer(0) || f > Ratio::from_integer(1) {
            return Err(Error::InvalidArgument(format!("{name} floor {f} outside (0, 1]")));
        }
    }
    let mut running_rate = Vec::with_capacity(report.rows.len());
    let mut running_ratio = Vec::with_capacity(report.rows.len());
    let (mut max_rate, mut max_ratio) = (Ratio::from_integer(0), Ratio::from_integer(0));
    for row in &report.rows {
        max_rate = max_rate.max(row.rate());
        max_ratio = max_ratio.max(row.ratio());
        running_rate.push(max_rate.into());
        running_ratio.push(max_ratio.into());
    }
    let min_rate = report.rows.iter().map(ReportRow::rate).min().expect("nonempty");
    let min_ratio = report.rows.iter().map(ReportRow::ratio).min().expect("nonempty");
    let (rate_pass, ratio_pass) = (min_rate >= rate_floor, min_ratio >= ratio_floor);
    Ok(Trend {
        rows: report.rows.len(),
        rate_floor: rate_floor.into(),
        ratio_floor: ratio_floor.into(),
        min_rate: min_rate.into(),
        min_ratio: min_ratio.into(),
        rate_pass,
        ratio_pass,
        pass: rate_pass && ratio_pass,
        running_max_rate: running_rate,
        running_max_ratio: running_ratio,
        note: TREND_NOTE.to_string(),
    })
}
