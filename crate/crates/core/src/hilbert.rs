//! Multipartite tensor-product structure: party layouts, product states,
//! inner products, full-vector expansion and partial traces.
//!
//! Conventions, used by every module:
//! - tensor expansion is big-endian in party order, so for three parties the
//!   global index is `((a·d_B)+b)·d_C + c`;
//! - a party of dimension 6 factored as qubit⊗qutrit uses `index = 3·i + j`,
//!   and a 2⊗2 factorization uses `index = 2·i + j`;
//! - states are unnormalized with exact rational (in practice integer)
//!   amplitudes; every check in scope is scale-invariant.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;

use crate::error::Error;
use crate::exactla::{RMatrix, Rational};

/// Local dimensions of the parties, with optional per-party factorizations
/// into subsystems.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PartySpec {
    parties: Vec<Party>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
struct Party {
    dim: usize,
    factors: Option<Vec<usize>>,
}

impl PartySpec {
    pub fn new(dims: &[usize]) -> Result<Self, Error> {
        if dims.is_empty() {
            return Err(Error::structure("a party spec needs at least one party"));
        }
        for &d in dims {
            if d < 2 {
                return Err(Error::structure(format!("party dimension {d} is below 2")));
            }
        }
        Ok(PartySpec {
            parties: dims
                .iter()
                .map(|&dim| Party { dim, factors: None })
                .collect(),
        })
    }

    pub fn with_factors(mut self, party: usize, factors: &[usize]) -> Result<Self, Error> {
        let p = self
            .parties
            .get_mut(party)
            .ok_or_else(|| Error::structure(format!("party index {party} out of range")))?;
        if factors.iter().product::<usize>() != p.dim {
            return Err(Error::structure(format!(
                "factors {factors:?} do not multiply to dimension {}",
                p.dim
            )));
        }
        if factors.iter().any(|&f| f < 2) {
            return Err(Error::structure("factor dimensions must be at least 2"));
        }
        p.factors = Some(factors.to_vec());
        Ok(self)
    }

    pub fn party_count(&self) -> usize {
        self.parties.len()
    }

    pub fn dim(&self, party: usize) -> usize {
        self.parties[party].dim
    }

    pub fn dims(&self) -> Vec<usize> {
        self.parties.iter().map(|p| p.dim).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.parties.iter().map(|p| p.dim).product()
    }

    /// Uppercase letter naming a party: A, B, C, ...
    pub fn party_name(party: usize) -> char {
        (b'A' + party as u8) as char
    }

    pub fn party_from_name(name: &str) -> Option<usize> {
        let mut chars = name.chars();
        let c = chars.next()?;
        if chars.next().is_some() {
            return None;
        }
        let c = c.to_ascii_uppercase();
        c.is_ascii_uppercase().then(|| (c as u8 - b'A') as usize)
    }

    /// Factor dimensions of a party; an unfactorized party counts as a
    /// single factor.
    pub fn factor_dims(&self, party: usize) -> Vec<usize> {
        match &self.parties[party].factors {
            Some(f) => f.clone(),
            None => vec![self.parties[party].dim],
        }
    }

    pub fn is_factorized(&self, party: usize) -> bool {
        self.parties[party].factors.is_some()
    }

    pub fn factor_count(&self, party: usize) -> usize {
        self.factor_dims(party).len()
    }

    /// All factor subsystems in canonical order (party ascending, factor
    /// ascending).
    pub fn factors(&self) -> Vec<FactorId> {
        let mut out = Vec::new();
        for party in 0..self.party_count() {
            for factor in 0..self.factor_count(party) {
                out.push(FactorId { party, factor });
            }
        }
        out
    }

    pub fn index_map(&self, party: usize) -> FactorIndexMap {
        FactorIndexMap {
            dims: self.factor_dims(party),
        }
    }
}

/// One factor subsystem of one party. Displays as e.g. `b2` (second factor
/// of party B).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct FactorId {
    pub party: usize,
    pub factor: usize,
}

impl fmt::Display for FactorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}",
            (b'a' + self.party as u8) as char,
            self.factor + 1
        )
    }
}

impl FromStr for FactorId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let mut chars = s.chars();
        let party = chars
            .next()
            .filter(|c| c.is_ascii_lowercase())
            .map(|c| (c as u8 - b'a') as usize)
            .ok_or_else(|| Error::structure(format!("bad factor label {s:?}")))?;
        let idx: usize = chars
            .as_str()
            .parse()
            .map_err(|_| Error::structure(format!("bad factor label {s:?}")))?;
        if idx == 0 {
            return Err(Error::structure(format!(
                "factor labels are 1-based: {s:?}"
            )));
        }
        Ok(FactorId {
            party,
            factor: idx - 1,
        })
    }
}

/// Bijection between a party's basis index and its factor multi-index,
/// big-endian: for dims `[2, 3]`, `index = 3·i + j`.
#[derive(Clone, Debug)]
pub struct FactorIndexMap {
    dims: Vec<usize>,
}

impl FactorIndexMap {
    pub fn new(dims: Vec<usize>) -> Self {
        FactorIndexMap { dims }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn to_multi(&self, mut index: usize) -> Vec<usize> {
        let mut multi = vec![0; self.dims.len()];
        for (slot, &d) in multi.iter_mut().zip(&self.dims).rev() {
            *slot = index % d;
            index /= d;
        }
        multi
    }

    pub fn from_multi(&self, multi: &[usize]) -> usize {
        multi
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&i, &d)| acc * d + i)
    }
}

/// Unnormalized product state: one rational vector per party.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ProductState {
    id: String,
    locals: Vec<Vec<Rational>>,
}

impl ProductState {
    pub fn new(id: impl Into<String>, locals: Vec<Vec<Rational>>) -> Result<Self, Error> {
        let id = id.into();
        if locals.is_empty() {
            return Err(Error::structure(format!("state {id} has no parties")));
        }
        for (p, v) in locals.iter().enumerate() {
            if v.iter().all(|x| x.is_zero()) {
                return Err(Error::structure(format!(
                    "state {id} has a zero local vector on party {p}"
                )));
            }
        }
        Ok(ProductState { id, locals })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn locals(&self) -> &[Vec<Rational>] {
        &self.locals
    }

    pub fn local(&self, party: usize) -> &[Rational] {
        &self.locals[party]
    }

    pub fn party_dims(&self) -> Vec<usize> {
        self.locals.iter().map(|v| v.len()).collect()
    }

    pub fn with_local(&self, party: usize, local: Vec<Rational>) -> Result<Self, Error> {
        let mut locals = self.locals.clone();
        locals[party] = local;
        ProductState::new(self.id.clone(), locals)
    }

    pub fn with_id(&self, id: impl Into<String>) -> Self {
        ProductState {
            id: id.into(),
            locals: self.locals.clone(),
        }
    }

    /// Product over parties of the local inner products. All amplitudes are
    /// real, so this is the exact Hilbert-space inner product.
    pub fn inner_product(&self, other: &ProductState) -> Result<Rational, Error> {
        if self.party_dims() != other.party_dims() {
            return Err(Error::structure(format!(
                "states {} and {} live on different party layouts",
                self.id, other.id
            )));
        }
        let mut acc = Rational::from_integer(1.into());
        for (a, b) in self.locals.iter().zip(&other.locals) {
            acc *= dot(a, b);
        }
        Ok(acc)
    }

    /// Tensor expansion in party order, big-endian.
    pub fn full_vector(&self) -> Vec<Rational> {
        let mut out = vec![Rational::from_integer(1.into())];
        for local in &self.locals {
            let mut next = Vec::with_capacity(out.len() * local.len());
            for a in &out {
                for b in local {
                    next.push(a * b);
                }
            }
            out = next;
        }
        out
    }

    /// Overall proportionality factor `λ` with `other = λ·self`, if the two
    /// states are proportional party by party.
    pub fn proportionality(&self, other: &ProductState) -> Option<Rational> {
        if self.party_dims() != other.party_dims() {
            return None;
        }
        let mut overall = Rational::from_integer(1.into());
        for (a, b) in self.locals.iter().zip(&other.locals) {
            overall *= local_ratio(a, b)?;
        }
        Some(overall)
    }
}

/// Scalar `μ` with `b = μ·a`, if the vectors are proportional.
pub fn local_ratio(a: &[Rational], b: &[Rational]) -> Option<Rational> {
    if a.len() != b.len() {
        return None;
    }
    let lead = a.iter().position(|x| !x.is_zero())?;
    if b[lead].is_zero() {
        return None;
    }
    let mu = &b[lead] / &a[lead];
    for (x, y) in a.iter().zip(b) {
        if *y != x * &mu {
            return None;
        }
    }
    Some(mu)
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    assert_eq!(a.len(), b.len(), "dot product of unequal lengths");
    let mut acc = Rational::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

/// Unnormalized density operator with exact rational entries. Symmetric and
/// positive semidefinite by construction (outer products and partial traces
/// of outer products); the trace need not be 1.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DensityMatrix {
    dim: usize,
    entries: RMatrix,
}

impl DensityMatrix {
    pub fn from_outer(v: &[Rational]) -> Self {
        let dim = v.len();
        let mut entries = RMatrix::zeros(dim, dim);
        for i in 0..dim {
            if v[i].is_zero() {
                continue;
            }
            for j in 0..dim {
                if !v[j].is_zero() {
                    entries.set(i, j, &v[i] * &v[j]);
                }
            }
        }
        DensityMatrix { dim, entries }
    }

    pub fn from_entries(entries: RMatrix) -> Result<Self, Error> {
        if entries.rows() != entries.cols() {
            return Err(Error::structure("density matrix must be square"));
        }
        if !entries.is_symmetric() {
            return Err(Error::structure("density matrix must be symmetric"));
        }
        Ok(DensityMatrix {
            dim: entries.rows(),
            entries,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &RMatrix {
        &self.entries
    }

    pub fn trace(&self) -> Rational {
        self.entries.trace()
    }

    pub fn kron(&self, rhs: &DensityMatrix) -> DensityMatrix {
        DensityMatrix {
            dim: self.dim * rhs.dim,
            entries: self.entries.kron(&rhs.entries),
        }
    }

    /// Partial trace over the subsystems flagged `false` in `keep`, where
    /// the current space factors as `dims` (big-endian).
    pub fn trace_out(&self, dims: &[usize], keep: &[bool]) -> Result<DensityMatrix, Error> {
        if dims.iter().product::<usize>() != self.dim || dims.len() != keep.len() {
            return Err(Error::structure("factor dims do not match density matrix"));
        }
        let map = FactorIndexMap::new(dims.to_vec());
        let kept_dims: Vec<usize> = dims
            .iter()
            .zip(keep)
            .filter_map(|(&d, &k)| k.then_some(d))
            .collect();
        let kept_total: usize = kept_dims.iter().product();
        let kept_map = FactorIndexMap::new(kept_dims);

        let mut out = RMatrix::zeros(kept_total, kept_total);
        for i in 0..self.dim {
            let mi = map.to_multi(i);
            for j in 0..self.dim {
                if self.entries.get(i, j).is_zero() {
                    continue;
                }
                let mj = map.to_multi(j);
                // traced-out coordinates must agree between bra and ket
                if mi
                    .iter()
                    .zip(&mj)
                    .zip(keep)
                    .any(|((a, b), &k)| !k && a != b)
                {
                    continue;
                }
                let ki: Vec<usize> = mi
                    .iter()
                    .zip(keep)
                    .filter_map(|(&x, &k)| k.then_some(x))
                    .collect();
                let kj: Vec<usize> = mj
                    .iter()
                    .zip(keep)
                    .filter_map(|(&x, &k)| k.then_some(x))
                    .collect();
                let (r, c) = (kept_map.from_multi(&ki), kept_map.from_multi(&kj));
                let val = out.get(r, c) + self.entries.get(i, j);
                out.set(r, c, val);
            }
        }
        Ok(DensityMatrix {
            dim: kept_total,
            entries: out,
        })
    }
}

/// Unnormalized partial trace of `|s⟩⟨s|` onto the kept factor subsystems.
///
/// Exploits the product structure: each party contributes its own block
/// (full outer product, local partial trace, or the scalar `⟨v|v⟩` when
/// fully discarded) and the blocks are Kronecker-multiplied in party order.
pub fn reduced_density(
    spec: &PartySpec,
    state: &ProductState,
    keep: &[FactorId],
) -> Result<DensityMatrix, Error> {
    if keep.is_empty() {
        return Err(Error::structure("keep set must not be empty"));
    }
    if state.party_dims() != spec.dims() {
        return Err(Error::structure(format!(
            "state {} does not match the party spec",
            state.id()
        )));
    }
    for f in keep {
        if f.party >= spec.party_count() {
            return Err(Error::structure(format!("unknown party in factor {f}")));
        }
        if f.factor >= spec.factor_count(f.party) {
            return Err(Error::structure(format!(
                "factor {f} does not exist on party {}",
                PartySpec::party_name(f.party)
            )));
        }
        if f.factor > 0 && !spec.is_factorized(f.party) {
            return Err(Error::structure(format!(
                "factor {f} refers to an unfactorized party"
            )));
        }
    }

    let mut acc: Option<DensityMatrix> = None;
    for party in 0..spec.party_count() {
        let dims = spec.factor_dims(party);
        let flags: Vec<bool> = (0..dims.len())
            .map(|factor| keep.contains(&FactorId { party, factor }))
            .collect();
        let local = state.local(party);
        let block = if flags.iter().all(|&k| k) {
            DensityMatrix::from_outer(local)
        } else if flags.iter().all(|&k| !k) {
            let norm = dot(local, local);
            DensityMatrix {
                dim: 1,
                entries: RMatrix::from_rows(vec![vec![norm]]).expect("1x1"),
            }
        } else {
            DensityMatrix::from_outer(local).trace_out(&dims, &flags)?
        };
        acc = Some(match acc {
            None => block,
            Some(prev) => prev.kron(&block),
        });
    }
    // Fully discarded parties contribute 1×1 scalar blocks, so the result
    // dimension is exactly the product of the kept factor dimensions.
    Ok(acc.expect("at least one party"))
}

/// True iff `trace(r1·r2) = 0` exactly; for positive semidefinite matrices
/// this is equivalent to orthogonal supports.
pub fn densities_orthogonal(r1: &DensityMatrix, r2: &DensityMatrix) -> Result<bool, Error> {
    if r1.dim != r2.dim {
        return Err(Error::structure(format!(
            "density dimensions differ: {} vs {}",
            r1.dim, r2.dim
        )));
    }
    Ok(overlap_trace(r1, r2).is_zero())
}

/// `trace(r1·r2)` without materializing the product.
pub fn overlap_trace(r1: &DensityMatrix, r2: &DensityMatrix) -> Rational {
    let mut acc = Rational::zero();
    for i in 0..r1.dim {
        for j in 0..r1.dim {
            let a = r1.entries.get(i, j);
            if !a.is_zero() {
                let b = r2.entries.get(j, i);
                if !b.is_zero() {
                    acc += a * b;
                }
            }
        }
    }
    acc
}

/// Kronecker product of local vectors in ascending party order.
pub fn kron_vecs(locals: &[&[Rational]]) -> Vec<Rational> {
    let mut out = vec![Rational::from_integer(1.into())];
    for local in locals {
        let mut next = Vec::with_capacity(out.len() * local.len());
        for a in &out {
            for b in *local {
                next.push(a * b);
            }
        }
        out = next;
    }
    out
}
