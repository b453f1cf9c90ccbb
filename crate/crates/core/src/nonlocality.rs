//! Nonlocality properties as decidable checks: freedom from local
//! redundancy, unextendibility of product bases, and trivial-OPM-only
//! certificates for (strong) local irreducibility.
//!
//! The irreducibility technique: an unknown Hermitian measurement operator
//! `E` on a party grouping must satisfy `⟨ψᵢ|(E⊗I)|ψⱼ⟩ = 0` for all pairs to
//! preserve orthogonality. With real states `E = S + i·A` decouples into
//! independent real linear systems for the symmetric and antisymmetric
//! parts, so the whole analysis stays in rational arithmetic. When the only
//! solution is `λ·I` (symmetric dimension 1, antisymmetric 0), every
//! orthogonality-preserving measurement on that grouping is trivial and the
//! set is locally irreducible there. The converse is not claimed: a
//! nontrivial solution does not by itself prove reducibility.

use num_traits::{One, Zero};

use crate::error::Error;
use crate::exactla::{self, normalize_primitive, rank, rat, RMatrix, Rational};
use crate::hilbert::{dot, kron_vecs, overlap_trace, DensityMatrix, FactorId, ProductState};
use crate::measurements::hermitian_elements_preserve_orthogonality;
use crate::statesets::StateSet;

/// Guard on the number of state→party assignments enumerated by
/// [`check_upb`].
pub const UPB_ENUMERATION_GUARD: u128 = 10_000_000;

/// Result of one discard pattern of the redundancy check.
#[derive(Clone, Debug)]
pub struct DiscardPattern {
    pub discarded: Vec<FactorId>,
    /// Pairs whose reduced densities have nonzero overlap trace.
    pub witnesses: Vec<(String, String)>,
}

impl DiscardPattern {
    pub fn orthogonality_preserved(&self) -> bool {
        self.witnesses.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct RedundancyReport {
    pub patterns: Vec<DiscardPattern>,
}

impl RedundancyReport {
    /// Free from local redundancy: every discard pattern breaks the
    /// orthogonality of at least one pair.
    pub fn redundancy_free(&self) -> bool {
        self.patterns.iter().all(|p| !p.witnesses.is_empty())
    }

    pub fn pattern(&self, discarded: &[FactorId]) -> Option<&DiscardPattern> {
        let mut key = discarded.to_vec();
        key.sort();
        self.patterns.iter().find(|p| p.discarded == key)
    }
}

/// Enumerate every nonempty, non-full subset of the factor subsystems as a
/// discard set; for each, reduce all states onto the kept factors and record
/// every pair with `trace(ρᵢ·ρⱼ) ≠ 0`.
///
/// Product structure keeps this cheap: the reduced density of a product
/// state factorizes per party, and the overlap trace is the product of the
/// per-party overlap traces.
pub fn check_local_redundancy(s: &StateSet) -> Result<RedundancyReport, Error> {
    let spec = s.spec();
    let factors = spec.factors();
    let count = factors.len();
    if count < 2 {
        return Err(Error::structure(
            "redundancy check needs at least two factor subsystems",
        ));
    }
    let mut patterns = Vec::new();
    for mask in 1u32..((1u32 << count) - 1) {
        let discarded: Vec<FactorId> = factors
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, f)| *f)
            .collect();

        // per party, per state: the reduced block on that party's kept factors
        let mut blocks: Vec<Vec<DensityMatrix>> = Vec::with_capacity(spec.party_count());
        for party in 0..spec.party_count() {
            let dims = spec.factor_dims(party);
            let flags: Vec<bool> = (0..dims.len())
                .map(|factor| !discarded.contains(&FactorId { party, factor }))
                .collect();
            let mut per_state = Vec::with_capacity(s.len());
            for state in s.states() {
                let local = state.local(party);
                let block = if flags.iter().all(|&k| k) {
                    DensityMatrix::from_outer(local)
                } else if flags.iter().all(|&k| !k) {
                    DensityMatrix::from_entries(
                        RMatrix::from_rows(vec![vec![dot(local, local)]]).expect("1x1"),
                    )
                    .expect("scalar block")
                } else {
                    DensityMatrix::from_outer(local).trace_out(&dims, &flags)?
                };
                per_state.push(block);
            }
            blocks.push(per_state);
        }

        let mut witnesses = Vec::new();
        for i in 0..s.len() {
            for j in (i + 1)..s.len() {
                let mut product = Rational::one();
                for party_blocks in &blocks {
                    product *= overlap_trace(&party_blocks[i], &party_blocks[j]);
                    if product.is_zero() {
                        break;
                    }
                }
                if !product.is_zero() {
                    witnesses.push((
                        s.states()[i].id().to_string(),
                        s.states()[j].id().to_string(),
                    ));
                }
            }
        }
        patterns.push(DiscardPattern {
            discarded,
            witnesses,
        });
    }
    Ok(RedundancyReport { patterns })
}

/// Verdict of the unextendibility check.
#[derive(Clone, Debug)]
pub struct UpbVerdict {
    pub is_upb: bool,
    /// Per-party local vectors of an extending product state, when one
    /// exists; orthogonal to every member by construction.
    pub witness: Option<Vec<Vec<Rational>>>,
    pub assignments_checked: u128,
}

/// Decide unextendibility by enumerating every assignment of states to
/// parties: the set is extendible iff some assignment leaves every party's
/// assigned locals spanning a proper subspace, and then per-party
/// orthocomplement vectors assemble an extending product state.
pub fn check_upb(s: &StateSet) -> Result<UpbVerdict, Error> {
    let parties = s.spec().party_count();
    let n = s.len();
    let total = (parties as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if total > UPB_ENUMERATION_GUARD {
        return Err(Error::EnumerationTooLarge {
            assignments: total,
            guard: UPB_ENUMERATION_GUARD,
        });
    }

    let mut assignment = vec![0usize; n];
    let mut checked: u128 = 0;
    loop {
        checked += 1;
        if let Some(witness) = try_assignment(s, &assignment) {
            debug_assert!(witness_is_orthogonal(s, &witness));
            return Ok(UpbVerdict {
                is_upb: false,
                witness: Some(witness),
                assignments_checked: checked,
            });
        }
        // next assignment in mixed radix
        let mut pos = 0;
        loop {
            if pos == n {
                return Ok(UpbVerdict {
                    is_upb: true,
                    witness: None,
                    assignments_checked: checked,
                });
            }
            assignment[pos] += 1;
            if assignment[pos] < parties {
                break;
            }
            assignment[pos] = 0;
            pos += 1;
        }
    }
}

fn try_assignment(s: &StateSet, assignment: &[usize]) -> Option<Vec<Vec<Rational>>> {
    let parties = s.spec().party_count();
    let mut witness = Vec::with_capacity(parties);
    for party in 0..parties {
        let rows: Vec<Vec<Rational>> = s
            .states()
            .iter()
            .zip(assignment)
            .filter(|(_, &a)| a == party)
            .map(|(st, _)| st.local(party).to_vec())
            .collect();
        let dim = s.spec().dim(party);
        let m = RMatrix::from_rows_with_cols(rows, dim).expect("locals have the party dim");
        let kernel = exactla::kernel_basis(&m);
        // a full span on any party makes this assignment useless
        witness.push(kernel.into_iter().next()?);
    }
    Some(witness)
}

fn witness_is_orthogonal(s: &StateSet, witness: &[Vec<Rational>]) -> bool {
    s.states().iter().all(|st| {
        let mut product = Rational::one();
        for (local, w) in st.locals().iter().zip(witness) {
            product *= dot(local, w);
        }
        product.is_zero()
    })
}

/// Solution-space dimensions of the orthogonality-preservation constraint
/// system for an unknown Hermitian operator on a party grouping.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OpmDims {
    /// dimension of the grouping's tensor space
    pub dim: usize,
    pub sym_dim: usize,
    pub antisym_dim: usize,
    /// (rows, unknowns) of the deduplicated symmetric system
    pub sym_shape: (usize, usize),
    pub antisym_shape: (usize, usize),
}

impl OpmDims {
    /// Only trivial orthogonality-preserving measurements exist on the
    /// grouping: the identity is the sole solution.
    pub fn trivial_only(&self) -> bool {
        self.sym_dim == 1 && self.antisym_dim == 0
    }
}

struct OpmSystem {
    dim: usize,
    sym: RMatrix,
    antisym: RMatrix,
}

fn build_opm_system(s: &StateSet, grouping: &[usize]) -> Result<OpmSystem, Error> {
    let parties = s.spec().party_count();
    if grouping.is_empty() || grouping.len() >= parties {
        return Err(Error::structure(
            "grouping must be a nonempty proper subset of the parties",
        ));
    }
    if grouping.windows(2).any(|w| w[0] >= w[1]) || grouping.iter().any(|&p| p >= parties) {
        return Err(Error::structure(
            "grouping must be ascending valid party indices",
        ));
    }
    let dim: usize = grouping.iter().map(|&p| s.spec().dim(p)).product();
    let vectors: Vec<Vec<Rational>> = s
        .states()
        .iter()
        .map(|st| {
            let locals: Vec<&[Rational]> = grouping.iter().map(|&p| st.local(p)).collect();
            kron_vecs(&locals)
        })
        .collect();
    let spectator = |a: &ProductState, b: &ProductState| {
        let mut acc = Rational::one();
        for p in 0..parties {
            if !grouping.contains(&p) {
                acc *= dot(a.local(p), b.local(p));
            }
        }
        acc
    };

    let sym_unknowns = dim * (dim + 1) / 2;
    let antisym_unknowns = dim * (dim - 1) / 2;
    let mut sym_rows: Vec<Vec<Rational>> = Vec::new();
    let mut antisym_rows: Vec<Vec<Rational>> = Vec::new();
    for i in 0..s.len() {
        for j in (i + 1)..s.len() {
            if spectator(&s.states()[i], &s.states()[j]).is_zero() {
                continue;
            }
            let (u, v) = (&vectors[i], &vectors[j]);
            let mut srow = Vec::with_capacity(sym_unknowns);
            let mut arow = Vec::with_capacity(antisym_unknowns);
            for k in 0..dim {
                for l in k..dim {
                    if k == l {
                        srow.push(&u[k] * &v[k]);
                    } else {
                        srow.push(&u[k] * &v[l] + &u[l] * &v[k]);
                        arow.push(&u[k] * &v[l] - &u[l] * &v[k]);
                    }
                }
            }
            push_unique(&mut sym_rows, srow);
            push_unique(&mut antisym_rows, arow);
        }
    }
    Ok(OpmSystem {
        dim,
        sym: RMatrix::from_rows_with_cols(sym_rows, sym_unknowns)?,
        antisym: RMatrix::from_rows_with_cols(antisym_rows, antisym_unknowns)?,
    })
}

/// Drop zero rows and exact duplicates (up to scale), which abound in the
/// highly symmetric families and cost elimination time.
fn push_unique(rows: &mut Vec<Vec<Rational>>, mut row: Vec<Rational>) {
    if row.iter().all(|x| x.is_zero()) {
        return;
    }
    normalize_primitive(&mut row);
    if let Some(lead) = row.iter().position(|x| !x.is_zero()) {
        if row[lead] < Rational::zero() {
            for x in row.iter_mut() {
                *x = -x.clone();
            }
        }
    }
    if !rows.contains(&row) {
        rows.push(row);
    }
}

/// Dimensions of the symmetric and antisymmetric solution spaces for the
/// grouping's constraint system. The identity is always a symmetric
/// solution, so `sym_dim ≥ 1`.
///
/// The system is built on the set exactly as given; for families embedded in
/// a larger space but supported on a subspace, restrict first (see
/// [`StateSet::support_restriction`]), otherwise unconstrained outside-
/// support directions inflate the dimensions.
pub fn opm_solution_dims(s: &StateSet, grouping: &[usize]) -> Result<OpmDims, Error> {
    let system = build_opm_system(s, grouping)?;
    let sym_rank = rank(&system.sym);
    let antisym_rank = rank(&system.antisym);
    Ok(OpmDims {
        dim: system.dim,
        sym_dim: system.sym.cols() - sym_rank,
        antisym_dim: system.antisym.cols() - antisym_rank,
        sym_shape: (system.sym.rows(), system.sym.cols()),
        antisym_shape: (system.antisym.rows(), system.antisym.cols()),
    })
}

/// Basis of the symmetric solution space, as symmetric matrices.
pub fn sym_solution_basis(s: &StateSet, grouping: &[usize]) -> Result<Vec<RMatrix>, Error> {
    let system = build_opm_system(s, grouping)?;
    let kernel = exactla::kernel_basis(&system.sym);
    Ok(kernel
        .into_iter()
        .map(|v| sym_vec_to_matrix(&v, system.dim))
        .collect())
}

fn sym_vec_to_matrix(v: &[Rational], dim: usize) -> RMatrix {
    let mut m = RMatrix::zeros(dim, dim);
    let mut idx = 0;
    for k in 0..dim {
        for l in k..dim {
            m.set(k, l, v[idx].clone());
            m.set(l, k, v[idx].clone());
            idx += 1;
        }
    }
    m
}

/// The coefficient vector of the identity in the symmetric unknowns.
pub fn sym_identity_vector(dim: usize) -> Vec<Rational> {
    let mut v = Vec::with_capacity(dim * (dim + 1) / 2);
    for k in 0..dim {
        for l in k..dim {
            v.push(if k == l {
                Rational::one()
            } else {
                Rational::zero()
            });
        }
    }
    v
}

/// A concrete nontrivial two-outcome orthogonality-preserving measurement
/// `{E, I−E}` on the grouping, built from a non-identity symmetric solution
/// `H` as `E = (I + H/(1+g))/2` with `g` the Gershgorin row-sum bound on the
/// spectral radius of `H`, so both outcomes are positive definite.
///
/// Returns `None` when the symmetric solution space is only the identity
/// line (no real nontrivial solution to scale).
pub fn materialize_nontrivial_opm(
    s: &StateSet,
    grouping: &[usize],
) -> Result<Option<(RMatrix, RMatrix)>, Error> {
    let basis = sym_solution_basis(s, grouping)?;
    let dim = match basis.first() {
        Some(m) => m.rows(),
        None => return Ok(None),
    };
    let identity = RMatrix::identity(dim);
    let h = basis.into_iter().find(|m| !is_identity_multiple(m));
    let Some(h) = h else {
        return Ok(None);
    };
    let mut bound = Rational::zero();
    for i in 0..dim {
        let mut row_sum = Rational::zero();
        for j in 0..dim {
            let x = h.get(i, j);
            row_sum += if *x < Rational::zero() {
                -x.clone()
            } else {
                x.clone()
            };
        }
        if row_sum > bound {
            bound = row_sum;
        }
    }
    let scale = (Rational::one() + bound) * rat(2);
    let e = identity
        .scale(&Rational::new(1.into(), 2.into()))
        .add(&h.scale(&(Rational::one() / scale)));
    let complement = identity.sub(&e);
    Ok(Some((e, complement)))
}

fn is_identity_multiple(m: &RMatrix) -> bool {
    let first = m.get(0, 0).clone();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let expected = if i == j {
                first.clone()
            } else {
                Rational::zero()
            };
            if *m.get(i, j) != expected {
                return false;
            }
        }
    }
    true
}

/// Verdict strings preserve the one-way implication: a trivial-only
/// certificate proves local irreducibility on that grouping; a nontrivial
/// solution only says a nontrivial orthogonality-preserving measurement
/// exists.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CertificateVerdict {
    TrivialOpmOnly,
    NontrivialOpmExists,
}

impl CertificateVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            CertificateVerdict::TrivialOpmOnly => "trivial-OPM-only (locally irreducible)",
            CertificateVerdict::NontrivialOpmExists => {
                "nontrivial-OPM-exists (no reducibility conclusion)"
            }
        }
    }
}

/// Constraint-system dimensions for one party grouping and the verdict they
/// force.
#[derive(Clone, Debug)]
pub struct IrreducibilityCertificate {
    pub grouping: Vec<usize>,
    pub dims: OpmDims,
    pub verdict: CertificateVerdict,
}

impl IrreducibilityCertificate {
    pub fn grouping_label(&self) -> String {
        self.grouping
            .iter()
            .map(|&p| crate::hilbert::PartySpec::party_name(p).to_string())
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct StrongIrreducibilityReport {
    /// party dimensions after support restriction
    pub restricted_dims: Vec<usize>,
    pub certificates: Vec<IrreducibilityCertificate>,
}

impl StrongIrreducibilityReport {
    /// Certified strongly irreducible: every grouping admits only trivial
    /// orthogonality-preserving measurements.
    pub fn strongly_irreducible(&self) -> bool {
        self.certificates
            .iter()
            .all(|c| c.verdict == CertificateVerdict::TrivialOpmOnly)
    }

    pub fn certificate(&self, grouping: &[usize]) -> Option<&IrreducibilityCertificate> {
        self.certificates.iter().find(|c| c.grouping == grouping)
    }
}

/// Certificates for every bipartition of the parties: for each single party
/// X, the grouping {X} and its complement. The set is restricted to its
/// per-party coordinate supports first, so families embedded in larger
/// spaces are certified on the space they actually occupy.
pub fn certify_strong_irreducibility(s: &StateSet) -> Result<StrongIrreducibilityReport, Error> {
    let parties = s.spec().party_count();
    if parties < 3 {
        return Err(Error::structure(
            "strong irreducibility needs at least three parties",
        ));
    }
    let restricted = s.support_restriction();
    let mut groupings: Vec<Vec<usize>> = Vec::new();
    for x in 0..parties {
        groupings.push(vec![x]);
    }
    for x in 0..parties {
        groupings.push((0..parties).filter(|&p| p != x).collect());
    }
    groupings.sort();
    groupings.dedup();
    groupings.sort_by_key(|g| (g.len(), g.clone()));

    let mut certificates = Vec::new();
    for grouping in groupings {
        let dims = opm_solution_dims(&restricted, &grouping)?;
        let verdict = if dims.trivial_only() {
            CertificateVerdict::TrivialOpmOnly
        } else {
            CertificateVerdict::NontrivialOpmExists
        };
        certificates.push(IrreducibilityCertificate {
            grouping,
            dims,
            verdict,
        });
    }
    Ok(StrongIrreducibilityReport {
        restricted_dims: restricted.spec().dims(),
        certificates,
    })
}

/// Validate a materialized `{E, I−E}` pair against the set via the
/// measurements module.
pub fn materialized_opm_is_orthogonality_preserving(
    s: &StateSet,
    grouping: &[usize],
    pair: &(RMatrix, RMatrix),
) -> Result<bool, Error> {
    hermitian_elements_preserve_orthogonality(s, grouping, &[pair.0.clone(), pair.1.clone()])
}
