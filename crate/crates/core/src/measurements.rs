//! Projective measurements on a party or party group: completeness,
//! orthogonality preservation, outcome application and triviality.
//!
//! Only projective (von Neumann) measurements are executed; general
//! Hermitian POVM elements appear in the irreducibility analysis and are
//! handled there through [`hermitian_elements_preserve_orthogonality`],
//! which never takes operator square roots.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_traits::{ToPrimitive, Zero};

use crate::error::Error;
use crate::exactla::{normalize_primitive, RMatrix, Rational};
use crate::hilbert::{dot, kron_vecs, PartySpec, ProductState};
use crate::statesets::StateSet;

/// Orthogonal projector with exact rational entries: `P² = P`, `Pᵀ = P`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Projector {
    dim: usize,
    entries: RMatrix,
}

impl Projector {
    /// Wrap a matrix, verifying idempotence and symmetry.
    pub fn new(entries: RMatrix) -> Result<Self, Error> {
        if entries.rows() != entries.cols() {
            return Err(Error::structure("projector must be square"));
        }
        if !entries.is_symmetric() {
            return Err(Error::structure("projector must be symmetric"));
        }
        if entries.matmul(&entries) != entries {
            return Err(Error::structure("projector must be idempotent"));
        }
        Ok(Projector {
            dim: entries.rows(),
            entries,
        })
    }

    pub fn zero(dim: usize) -> Self {
        Projector {
            dim,
            entries: RMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Projector {
            dim,
            entries: RMatrix::identity(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &RMatrix {
        &self.entries
    }

    /// The trace of a projector equals its rank.
    pub fn rank(&self) -> usize {
        let t = self.entries.trace();
        assert!(t.is_integer(), "projector trace must be integral");
        t.to_integer().to_usize().expect("small nonnegative rank")
    }

    pub fn apply(&self, v: &[Rational]) -> Vec<Rational> {
        self.entries.matvec(v)
    }

    pub fn is_trivial(&self) -> bool {
        self.entries.is_zero_matrix() || self.entries == RMatrix::identity(self.dim)
    }
}

/// Orthogonal projector onto the span of the given vectors, computed
/// rationally; linearly dependent vectors are pruned.
pub fn projector_from_span(dim: usize, vectors: &[Vec<Rational>]) -> Result<Projector, Error> {
    let mut basis: Vec<Vec<Rational>> = Vec::new();
    for v in vectors {
        if v.len() != dim {
            return Err(Error::structure(format!(
                "span vector has length {}, expected {dim}",
                v.len()
            )));
        }
        if v.iter().all(|x| x.is_zero()) {
            return Err(Error::structure("span vectors must be nonzero"));
        }
        // orthogonalize against the basis collected so far
        let mut w = v.clone();
        for u in &basis {
            let coeff = dot(u, &w) / dot(u, u);
            if !coeff.is_zero() {
                for (wi, ui) in w.iter_mut().zip(u) {
                    *wi -= &coeff * ui;
                }
            }
        }
        if !w.iter().all(|x| x.is_zero()) {
            normalize_primitive(&mut w);
            basis.push(w);
        }
    }
    let mut entries = RMatrix::zeros(dim, dim);
    for u in &basis {
        let norm = dot(u, u);
        for i in 0..dim {
            if u[i].is_zero() {
                continue;
            }
            for j in 0..dim {
                if !u[j].is_zero() {
                    let val = entries.get(i, j) + &u[i] * &u[j] / &norm;
                    entries.set(i, j, val);
                }
            }
        }
    }
    Ok(Projector { dim, entries })
}

/// How one outcome subspace is specified.
#[derive(Clone, Debug)]
pub enum OutcomeSpec {
    Span(Vec<Vec<Rational>>),
    /// Identity minus the other outcomes.
    Complement,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Outcome {
    label: String,
    projector: Projector,
}

impl Outcome {
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn projector(&self) -> &Projector {
        &self.projector
    }
}

/// Projective measurement on one party or a party group, given by outcome
/// subspaces. Projectors are resolved once at construction and cached.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Measurement {
    name: String,
    target: Vec<usize>,
    dim: usize,
    outcomes: Vec<Outcome>,
}

impl Measurement {
    /// Build a measurement on the given target parties (ascending party
    /// indices) acting on a `dim`-dimensional target space. At most one
    /// outcome may be the complement of the others.
    pub fn new(
        name: impl Into<String>,
        target: Vec<usize>,
        dim: usize,
        specs: Vec<(String, OutcomeSpec)>,
    ) -> Result<Self, Error> {
        let name = name.into();
        if target.is_empty() {
            return Err(Error::structure("measurement needs a target party"));
        }
        if target.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::structure(
                "target parties must be strictly ascending",
            ));
        }
        if specs.is_empty() {
            return Err(Error::structure("measurement needs at least one outcome"));
        }
        let labels: BTreeSet<&str> = specs.iter().map(|(l, _)| l.as_str()).collect();
        if labels.len() != specs.len() {
            return Err(Error::structure("duplicate outcome labels"));
        }
        let complements = specs
            .iter()
            .filter(|(_, s)| matches!(s, OutcomeSpec::Complement))
            .count();
        if complements > 1 {
            return Err(Error::structure("at most one complement outcome"));
        }

        let mut resolved: Vec<Option<Projector>> = Vec::new();
        let mut sum = RMatrix::zeros(dim, dim);
        for (_, spec) in &specs {
            match spec {
                OutcomeSpec::Span(vectors) => {
                    let p = projector_from_span(dim, vectors)?;
                    sum = sum.add(p.entries());
                    resolved.push(Some(p));
                }
                OutcomeSpec::Complement => resolved.push(None),
            }
        }
        if complements == 1 {
            let comp = RMatrix::identity(dim).sub(&sum);
            let p = Projector::new(comp).map_err(|_| {
                Error::structure(
                    "complement is not a projector; the explicit outcomes must span mutually orthogonal subspaces",
                )
            })?;
            for slot in &mut resolved {
                if slot.is_none() {
                    *slot = Some(p.clone());
                }
            }
        }
        let outcomes = specs
            .into_iter()
            .zip(resolved)
            .map(|((label, _), p)| Outcome {
                label,
                projector: p.expect("all outcomes resolved"),
            })
            .collect();
        Ok(Measurement {
            name,
            target,
            dim,
            outcomes,
        })
    }

    /// Single-party measurement.
    pub fn local(
        name: impl Into<String>,
        party: usize,
        dim: usize,
        specs: Vec<(String, OutcomeSpec)>,
    ) -> Result<Self, Error> {
        Measurement::new(name, vec![party], dim, specs)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn target(&self) -> &[usize] {
        &self.target
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn outcome(&self, label: &str) -> Option<&Outcome> {
        self.outcomes.iter().find(|o| o.label == label)
    }

    /// True iff the outcome projectors sum to the identity on the target
    /// space of the given dimension.
    pub fn is_complete(&self, dim: usize) -> bool {
        if dim != self.dim {
            return false;
        }
        let mut sum = RMatrix::zeros(dim, dim);
        for o in &self.outcomes {
            sum = sum.add(o.projector.entries());
        }
        sum == RMatrix::identity(dim)
    }

    /// True iff every outcome projector is proportional to the identity
    /// (for projectors: zero or the identity), so the measurement conveys
    /// no information.
    pub fn is_trivial(&self) -> bool {
        self.outcomes.iter().all(|o| o.projector.is_trivial())
    }

    /// Kronecker-expanded target component of a state, ascending party order.
    pub fn target_vector(&self, state: &ProductState) -> Vec<Rational> {
        let locals: Vec<&[Rational]> = self.target.iter().map(|&p| state.local(p)).collect();
        kron_vecs(&locals)
    }

    /// Product of the local overlaps on all non-target parties.
    pub fn spectator_overlap(&self, a: &ProductState, b: &ProductState) -> Rational {
        let mut acc = Rational::from_integer(1.into());
        for p in 0..a.party_dims().len() {
            if !self.target.contains(&p) {
                acc *= dot(a.local(p), b.local(p));
            }
        }
        acc
    }

    fn check_target_dims(&self, spec: &PartySpec) -> Result<(), Error> {
        for &p in &self.target {
            if p >= spec.party_count() {
                return Err(Error::structure(format!(
                    "measurement {} targets party {p}, set has {} parties",
                    self.name,
                    spec.party_count()
                )));
            }
        }
        let dim: usize = self.target.iter().map(|&p| spec.dim(p)).product();
        if dim != self.dim {
            return Err(Error::structure(format!(
                "measurement {} acts on dimension {}, target parties give {dim}",
                self.name, self.dim
            )));
        }
        Ok(())
    }
}

/// True iff the outcome projectors sum to the identity.
pub fn check_completeness(m: &Measurement, dim: usize) -> bool {
    m.is_complete(dim)
}

/// True iff for every outcome the projected, surviving states remain
/// pairwise orthogonal.
///
/// Uses `⟨Pψᵢ|Pψⱼ⟩ = ⟨ψᵢ|P⊗I|ψⱼ⟩`, which factorizes over parties for
/// product states, so nothing is materialized.
pub fn is_orthogonality_preserving(s: &StateSet, m: &Measurement) -> Result<bool, Error> {
    m.check_target_dims(s.spec())?;
    if !m.is_complete(m.dim) {
        return Err(Error::structure(format!(
            "measurement {} is not complete on its target",
            m.name
        )));
    }
    let elements: Vec<&RMatrix> = m.outcomes.iter().map(|o| o.projector.entries()).collect();
    pairwise_preserved(s, &m.target, &elements)
}

/// Orthogonality preservation for abstract Hermitian measurement elements
/// `{Eₖ}` with `ΣEₖ = I` (each PSD): every surviving pair must satisfy
/// `⟨ψᵢ|Eₖ⊗I|ψⱼ⟩ = 0`. For projective outcomes this coincides with
/// [`is_orthogonality_preserving`].
pub fn hermitian_elements_preserve_orthogonality(
    s: &StateSet,
    target: &[usize],
    elements: &[RMatrix],
) -> Result<bool, Error> {
    let dim: usize = target.iter().map(|&p| s.spec().dim(p)).product();
    let mut sum = RMatrix::zeros(dim, dim);
    for e in elements {
        if e.rows() != dim || e.cols() != dim {
            return Err(Error::structure("element dimension mismatch"));
        }
        if !e.is_symmetric() {
            return Err(Error::structure("elements must be symmetric"));
        }
        sum = sum.add(e);
    }
    if sum != RMatrix::identity(dim) {
        return Err(Error::structure("elements must sum to the identity"));
    }
    let refs: Vec<&RMatrix> = elements.iter().collect();
    pairwise_preserved(s, target, &refs)
}

fn pairwise_preserved(
    s: &StateSet,
    target: &[usize],
    elements: &[&RMatrix],
) -> Result<bool, Error> {
    let targets: Vec<Vec<Rational>> = s
        .states()
        .iter()
        .map(|st| {
            let locals: Vec<&[Rational]> = target.iter().map(|&p| st.local(p)).collect();
            kron_vecs(&locals)
        })
        .collect();
    let spectator = |a: &ProductState, b: &ProductState| -> Rational {
        let mut acc = Rational::from_integer(1.into());
        for p in 0..s.spec().party_count() {
            if !target.contains(&p) {
                acc *= dot(a.local(p), b.local(p));
            }
        }
        acc
    };
    for element in elements {
        let survives: Vec<bool> = targets
            .iter()
            .map(|u| !element.bilinear(u, u).is_zero())
            .collect();
        for i in 0..s.len() {
            if !survives[i] {
                continue;
            }
            for j in (i + 1)..s.len() {
                if !survives[j] {
                    continue;
                }
                if spectator(&s.states()[i], &s.states()[j]).is_zero() {
                    continue;
                }
                if !element.bilinear(&targets[i], &targets[j]).is_zero() {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Replace every state's target component by its projection under the given
/// outcome, re-expressed with primitive integer amplitudes.
///
/// Grouped targets are projected on the expanded pair space and must stay a
/// product across the group. The output set is verified to be pairwise
/// orthogonal, which is exactly the orthogonality-preservation contract for
/// this outcome.
pub fn apply_outcome(s: &StateSet, m: &Measurement, label: &str) -> Result<StateSet, Error> {
    m.check_target_dims(s.spec())?;
    let outcome = m.outcome(label).ok_or_else(|| {
        Error::structure(format!("measurement {} has no outcome {label}", m.name))
    })?;
    let mut states = Vec::with_capacity(s.len());
    for st in s.states() {
        states.push(project_state(s.spec(), st, m, outcome)?);
    }
    let out = StateSet::new(s.spec().clone(), states)?;
    if let Some(v) = out.check_orthogonality().first() {
        return Err(Error::structure(format!(
            "outcome {label} of {} breaks orthogonality: ({}, {})",
            m.name, v.a, v.b
        )));
    }
    Ok(out)
}

fn project_state(
    spec: &PartySpec,
    state: &ProductState,
    m: &Measurement,
    outcome: &Outcome,
) -> Result<ProductState, Error> {
    let projected = outcome.projector.apply(&m.target_vector(state));
    if projected.iter().all(|x| x.is_zero()) {
        return Err(Error::AnnihilatedState {
            state: state.id().to_string(),
            outcome: outcome.label.clone(),
        });
    }
    let dims: Vec<usize> = m.target.iter().map(|&p| spec.dim(p)).collect();
    let factors = split_product(&projected, &dims).ok_or_else(|| Error::NonProductResult {
        state: state.id().to_string(),
        outcome: outcome.label.clone(),
    })?;
    let mut locals = state.locals().to_vec();
    for (&party, mut local) in m.target.iter().zip(factors) {
        normalize_primitive(&mut local);
        locals[party] = local;
    }
    ProductState::new(state.id(), locals)
}

/// Factor a vector on a product space into per-subsystem vectors, if it is a
/// product. Splits off the leading subsystem and recurses.
fn split_product(v: &[Rational], dims: &[usize]) -> Option<Vec<Vec<Rational>>> {
    if dims.len() == 1 {
        return Some(vec![v.to_vec()]);
    }
    let head = dims[0];
    let rest: usize = dims[1..].iter().product();
    let lead_block =
        (0..head).find(|&i| v[i * rest..(i + 1) * rest].iter().any(|x| !x.is_zero()))?;
    let tail: Vec<Rational> = v[lead_block * rest..(lead_block + 1) * rest].to_vec();
    let pivot = tail.iter().position(|x| !x.is_zero())?;
    let mut head_vec = Vec::with_capacity(head);
    for i in 0..head {
        head_vec.push(&v[i * rest + pivot] / &tail[pivot]);
    }
    // a product requires the reshaped head × rest block to have rank one
    for i in 0..head {
        for j in 0..rest {
            if v[i * rest + j] != &head_vec[i] * &tail[j] {
                return None;
            }
        }
    }
    let mut out = vec![head_vec];
    out.extend(split_product(&tail, &dims[1..])?);
    Some(out)
}

/// Primitive spanning vectors of a projector's range (independent rows).
pub fn projector_span(p: &Projector) -> Vec<Vec<Rational>> {
    let mut basis: Vec<Vec<Rational>> = Vec::new();
    let mut current = Projector::zero(p.dim());
    for i in 0..p.dim() {
        let row = p.entries().row(i).to_vec();
        if row.iter().all(|x| x.is_zero()) {
            continue;
        }
        let mut candidate = basis.clone();
        candidate.push(row.clone());
        let grown = projector_from_span(p.dim(), &candidate).expect("rows are nonzero");
        if grown != current {
            let mut primitive = row;
            normalize_primitive(&mut primitive);
            basis.push(primitive);
            current = grown;
        }
    }
    basis
}

/// Serialize a measurement into the text format:
/// `target: B ; dim: 6 ; outcome K1: span [v; ...] ; outcome K2: complement`.
/// Complement outcomes are written as resolved spans so files stand alone.
pub fn write_measurement(m: &Measurement) -> String {
    let mut out = String::new();
    let target: Vec<String> = m
        .target
        .iter()
        .map(|&p| PartySpec::party_name(p).to_string())
        .collect();
    write!(out, "target: {} ; dim: {}", target.join(","), m.dim).unwrap();
    for o in &m.outcomes {
        let vectors: Vec<String> = projector_span(&o.projector)
            .iter()
            .map(|v| {
                v.iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        write!(out, " ; outcome {}: span [{}]", o.label, vectors.join("; ")).unwrap();
    }
    out
}

fn parse_vector_list(s: &str) -> Result<Vec<Vec<Rational>>, Error> {
    s.split(';')
        .map(|v| {
            v.trim()
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<Rational>()
                        .map_err(|_| Error::parse(0, format!("bad amplitude {t:?}")))
                })
                .collect()
        })
        .collect()
}

/// Split on `;` at bracket depth zero, so vector separators inside
/// `span [...]` survive.
fn split_clauses(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '[' => depth += 1,
            ']' => depth = depth.saturating_sub(1),
            ';' if depth == 0 => {
                out.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&text[start..]);
    out
}

/// Parse the measurement text format; `name` is attached to the result.
pub fn parse_measurement(name: &str, text: &str) -> Result<Measurement, Error> {
    let mut target: Option<Vec<usize>> = None;
    let mut dim: Option<usize> = None;
    let mut specs: Vec<(String, OutcomeSpec)> = Vec::new();
    for clause in split_clauses(text) {
        let clause = clause.trim();
        if clause.is_empty() {
            continue;
        }
        let (key, value) = clause
            .split_once(':')
            .ok_or_else(|| Error::parse(0, format!("bad clause {clause:?}")))?;
        let key = key.trim();
        let value = value.trim();
        if key == "target" {
            let parties: Option<Vec<usize>> = value
                .split(',')
                .map(|t| PartySpec::party_from_name(t.trim()))
                .collect();
            target = Some(parties.ok_or_else(|| Error::parse(0, format!("bad target {value:?}")))?);
        } else if key == "dim" {
            dim = Some(
                value
                    .parse()
                    .map_err(|_| Error::parse(0, format!("bad dim {value:?}")))?,
            );
        } else if let Some(label) = key.strip_prefix("outcome ") {
            let spec = if value == "complement" {
                OutcomeSpec::Complement
            } else {
                let inner = value
                    .strip_prefix("span [")
                    .and_then(|v| v.strip_suffix(']'))
                    .ok_or_else(|| Error::parse(0, format!("bad outcome spec {value:?}")))?;
                if inner.trim().is_empty() {
                    OutcomeSpec::Span(Vec::new())
                } else {
                    OutcomeSpec::Span(parse_vector_list(inner)?)
                }
            };
            specs.push((label.trim().to_string(), spec));
        } else {
            return Err(Error::parse(0, format!("unknown clause {key:?}")));
        }
    }
    let target = target.ok_or_else(|| Error::parse(0, "missing target clause"))?;
    let dim = dim.ok_or_else(|| Error::parse(0, "missing dim clause"))?;
    Measurement::new(name, target, dim, specs)
}

/// The `span [v; ...]` clause for a list of integer vectors; small helper
/// shared by the protocol builders.
pub fn span_of(vectors: &[&[i64]]) -> OutcomeSpec {
    OutcomeSpec::Span(
        vectors
            .iter()
            .map(|v| v.iter().map(|&x| crate::exactla::rat(x)).collect())
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use crate::exactla::{rat, rvec};
    use crate::hilbert::ProductState;
    use crate::statesets::{build_g1, StateSet};

    use super::*;

    fn span(vectors: &[&[i64]]) -> OutcomeSpec {
        span_of(vectors)
    }

    /// Bob's coarse two-outcome measurement onto the lower/upper halves of C⁶.
    fn k_b() -> Measurement {
        Measurement::local(
            "K_B",
            1,
            6,
            vec![
                (
                    "K1".into(),
                    span(&[
                        &[1, 0, 0, 0, 0, 0],
                        &[0, 1, 0, 0, 0, 0],
                        &[0, 0, 1, 0, 0, 0],
                    ]),
                ),
                (
                    "K2".into(),
                    span(&[
                        &[0, 0, 0, 1, 0, 0],
                        &[0, 0, 0, 0, 1, 0],
                        &[0, 0, 0, 0, 0, 1],
                    ]),
                ),
            ],
        )
        .unwrap()
    }

    /// The four-outcome C⁶ measurement with rank-1 difference projectors and
    /// a complement.
    fn m1_c6(party: usize) -> Measurement {
        Measurement::local(
            "M1",
            party,
            6,
            vec![
                ("P1".into(), span(&[&[1, 0, 0, 0, -1, 0]])),
                ("P2".into(), span(&[&[0, 1, 0, 0, 0, -1]])),
                ("P3".into(), span(&[&[0, 0, 1, -1, 0, 0]])),
                ("P4".into(), OutcomeSpec::Complement),
            ],
        )
        .unwrap()
    }

    #[test]
    fn projector_examples() {
        let p = projector_from_span(2, &[rvec(&[1, 0])]).unwrap();
        assert_eq!(*p.entries().get(0, 0), rat(1));
        assert_eq!(*p.entries().get(1, 1), rat(0));

        let p = projector_from_span(6, &[rvec(&[1, 0, 0, 0, -1, 0])]).unwrap();
        assert_eq!(p.rank(), 1);
        let half = Rational::new(1.into(), 2.into());
        assert_eq!(*p.entries().get(0, 0), half);
        assert_eq!(*p.entries().get(4, 4), half);
        assert_eq!(*p.entries().get(0, 4), -half.clone());
        assert_eq!(*p.entries().get(4, 0), -half);

        let doubled = projector_from_span(2, &[rvec(&[1, 0]), rvec(&[1, 0])]).unwrap();
        assert_eq!(doubled, projector_from_span(2, &[rvec(&[1, 0])]).unwrap());
    }

    #[test]
    fn projector_invariants_hold() {
        for vectors in [
            vec![rvec(&[1, 2, 3]), rvec(&[0, 1, 1])],
            vec![rvec(&[1, 1, 0]), rvec(&[2, 2, 0]), rvec(&[0, 0, 5])],
        ] {
            let p = projector_from_span(3, &vectors).unwrap();
            assert!(p.entries().is_symmetric());
            assert_eq!(p.entries().matmul(p.entries()), *p.entries());
        }
    }

    #[test]
    fn completeness_checks() {
        assert!(check_completeness(&m1_c6(0), 6));
        assert!(k_b().is_complete(6));
        let lonely = Measurement::local("P", 0, 2, vec![("P1".into(), span(&[&[1, 0]]))]).unwrap();
        assert!(!check_completeness(&lonely, 2));
    }

    #[test]
    fn complement_requires_orthogonal_spans() {
        let bad = Measurement::local(
            "bad",
            0,
            2,
            vec![
                ("A".into(), span(&[&[1, 0]])),
                ("B".into(), span(&[&[1, 1]])),
                ("C".into(), OutcomeSpec::Complement),
            ],
        );
        assert!(bad.is_err());
    }

    #[test]
    fn trivial_measurements() {
        let identity =
            Measurement::local("I", 0, 2, vec![("I".into(), span(&[&[1, 0], &[0, 1]]))]).unwrap();
        assert!(identity.is_trivial());
        assert_eq!(identity.outcomes()[0].projector(), &Projector::identity(2));
        assert!(!k_b().is_trivial());
        assert!(!m1_c6(0).is_trivial());
    }

    #[test]
    fn g1_with_k_b_preserves_orthogonality() {
        let g1 = build_g1();
        assert!(is_orthogonality_preserving(&g1, &k_b()).unwrap());
    }

    #[test]
    fn identity_measurement_preserves_any_set() {
        let g1 = build_g1();
        let identity = Measurement::local(
            "I",
            1,
            6,
            vec![(
                "I".into(),
                span(&[
                    &[1, 0, 0, 0, 0, 0],
                    &[0, 1, 0, 0, 0, 0],
                    &[0, 0, 1, 0, 0, 0],
                    &[0, 0, 0, 1, 0, 0],
                    &[0, 0, 0, 0, 1, 0],
                    &[0, 0, 0, 0, 0, 1],
                ]),
            )],
        )
        .unwrap();
        assert!(is_orthogonality_preserving(&g1, &identity).unwrap());
    }

    /// Brute-force reference: expand P⊗I, project every full vector and
    /// compare all pairwise dots.
    fn brute_force_preserving(s: &StateSet, m: &Measurement) -> bool {
        let n_parties = s.spec().party_count();
        for outcome in m.outcomes() {
            let mut big = RMatrix::identity(1);
            let mut p = 0;
            while p < n_parties {
                if m.target().contains(&p) {
                    big = big.kron(outcome.projector().entries());
                    p += m.target().len();
                } else {
                    big = big.kron(&RMatrix::identity(s.spec().dim(p)));
                    p += 1;
                }
            }
            let projected: Vec<Vec<Rational>> = s
                .states()
                .iter()
                .map(|st| big.matvec(&st.full_vector()))
                .collect();
            for i in 0..projected.len() {
                if projected[i].iter().all(|x| x.is_zero()) {
                    continue;
                }
                for j in (i + 1)..projected.len() {
                    if projected[j].iter().all(|x| x.is_zero()) {
                        continue;
                    }
                    if !dot(&projected[i], &projected[j]).is_zero() {
                        return false;
                    }
                }
            }
        }
        true
    }

    #[test]
    fn rank_one_measurement_matches_brute_force() {
        let g1 = build_g1();
        let m = Measurement::local(
            "probe",
            1,
            6,
            vec![
                ("P".into(), span(&[&[1, 0, 0, 0, 0, 0]])),
                ("rest".into(), OutcomeSpec::Complement),
            ],
        )
        .unwrap();
        let fast = is_orthogonality_preserving(&g1, &m).unwrap();
        assert_eq!(fast, brute_force_preserving(&g1, &m));
    }

    #[test]
    fn apply_outcome_theorem1_examples() {
        let g1 = build_g1();
        let kb = k_b();
        let k1 = apply_outcome(&g1, &kb, "K1").unwrap();
        assert_eq!(
            k1.get("psi3").unwrap().local(1),
            &rvec(&[1, 0, 0, 0, 0, 0])[..]
        );
        let k2 = apply_outcome(&g1, &kb, "K2").unwrap();
        assert_eq!(
            k2.get("psi1").unwrap().local(1),
            &rvec(&[0, 0, 0, 0, 1, -1])[..]
        );
        // party dimensions never change
        assert_eq!(k1.spec().dims(), g1.spec().dims());
        assert_eq!(k1.len(), 5);
        assert_eq!(k2.len(), 5);
    }

    #[test]
    fn apply_outcome_fixed_point_inside_subspace() {
        let g1 = build_g1();
        let kb = k_b();
        let k1 = apply_outcome(&g1, &kb, "K1").unwrap();
        let again = apply_outcome(&k1, &kb, "K1").unwrap();
        assert_eq!(again, k1);
    }

    #[test]
    fn apply_outcome_annihilation() {
        let g1 = build_g1();
        // psi3's Bob component 𝟎−𝟒 has no overlap with span{𝟏}
        let m = Measurement::local(
            "kill",
            1,
            6,
            vec![
                ("hit".into(), span(&[&[0, 1, 0, 0, 0, 0]])),
                ("rest".into(), OutcomeSpec::Complement),
            ],
        )
        .unwrap();
        let err = apply_outcome(&g1, &m, "hit").unwrap_err();
        assert!(matches!(err, Error::AnnihilatedState { .. }));
    }

    #[test]
    fn grouped_outcome_stays_product() {
        let spec = crate::hilbert::PartySpec::new(&[2, 2]).unwrap();
        let s = StateSet::new(
            spec,
            vec![ProductState::new("s", vec![rvec(&[1, 1]), rvec(&[1, 0])]).unwrap()],
        )
        .unwrap();
        // joint projection onto span{|00⟩, |10⟩} keeps the product structure
        let m = Measurement::new(
            "joint",
            vec![0, 1],
            4,
            vec![
                ("P".into(), span(&[&[1, 0, 0, 0], &[0, 0, 1, 0]])),
                ("rest".into(), OutcomeSpec::Complement),
            ],
        )
        .unwrap();
        let out = apply_outcome(&s, &m, "P").unwrap();
        assert_eq!(out.get("s").unwrap().local(0), &rvec(&[1, 1])[..]);
        assert_eq!(out.get("s").unwrap().local(1), &rvec(&[1, 0])[..]);
    }

    #[test]
    fn grouped_outcome_non_product_is_an_error() {
        let spec = crate::hilbert::PartySpec::new(&[2, 2]).unwrap();
        let s = StateSet::new(
            spec,
            vec![ProductState::new("s", vec![rvec(&[1, 0]), rvec(&[1, 1])]).unwrap()],
        )
        .unwrap();
        // projecting |0⟩(|0⟩+|1⟩) onto span{|00⟩+|11⟩} gives an entangled vector
        let m = Measurement::new(
            "joint",
            vec![0, 1],
            4,
            vec![
                ("P".into(), span(&[&[1, 0, 0, 1]])),
                ("rest".into(), OutcomeSpec::Complement),
            ],
        )
        .unwrap();
        let err = apply_outcome(&s, &m, "P").unwrap_err();
        assert!(matches!(err, Error::NonProductResult { .. }));
    }

    #[test]
    fn state_level_completeness() {
        let g1 = build_g1();
        let m = m1_c6(1);
        let psi5 = g1.get("psi5").unwrap();
        let u = m.target_vector(psi5);
        let mut total = vec![Rational::zero(); 6];
        for o in m.outcomes() {
            for (t, x) in total.iter_mut().zip(o.projector().apply(&u)) {
                *t += x;
            }
        }
        assert_eq!(total, u);
    }

    #[test]
    fn hermitian_elements_check() {
        let g1 = build_g1();
        let kb = k_b();
        let elements: Vec<RMatrix> = kb
            .outcomes()
            .iter()
            .map(|o| o.projector().entries().clone())
            .collect();
        assert!(hermitian_elements_preserve_orthogonality(&g1, &[1], &elements).unwrap());
        // a family that does not sum to the identity is rejected
        assert!(hermitian_elements_preserve_orthogonality(&g1, &[1], &elements[..1]).is_err());
    }

    #[test]
    fn measurement_text_round_trip() {
        for m in [k_b(), m1_c6(0)] {
            let text = write_measurement(&m);
            let parsed = parse_measurement(m.name(), &text).unwrap();
            assert_eq!(parsed.target(), m.target());
            assert_eq!(parsed.outcomes().len(), m.outcomes().len());
            for (a, b) in parsed.outcomes().iter().zip(m.outcomes()) {
                assert_eq!(a.label(), b.label());
                assert_eq!(a.projector(), b.projector());
            }
        }
    }
}
