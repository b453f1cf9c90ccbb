//! Constructors for every state family in scope, plus orthogonality
//! verification, support restriction and the state-set text format.
//!
//! The 27-state families and the strong templates share one 15-row layout
//! table; the seed family and the template differ only in how the per-party
//! symbols are interpreted as local vectors.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_traits::Zero;

use crate::error::Error;
use crate::exactla::{rat, Rational};
use crate::hilbert::{PartySpec, ProductState};

/// Ordered set of product states over a shared party layout, with unique
/// state ids.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StateSet {
    spec: PartySpec,
    states: Vec<ProductState>,
}

impl StateSet {
    pub fn new(spec: PartySpec, states: Vec<ProductState>) -> Result<Self, Error> {
        let mut seen = BTreeSet::new();
        for s in &states {
            if s.party_dims() != spec.dims() {
                return Err(Error::structure(format!(
                    "state {} does not match the party layout {:?}",
                    s.id(),
                    spec.dims()
                )));
            }
            if !seen.insert(s.id().to_string()) {
                return Err(Error::structure(format!("duplicate state id {}", s.id())));
            }
        }
        Ok(StateSet { spec, states })
    }

    pub fn spec(&self) -> &PartySpec {
        &self.spec
    }

    pub fn states(&self) -> &[ProductState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&ProductState> {
        self.states.iter().find(|s| s.id() == id)
    }

    pub fn ids(&self) -> Vec<String> {
        self.states.iter().map(|s| s.id().to_string()).collect()
    }

    /// All violating pairs with their inner products; empty iff the set is
    /// pairwise orthogonal.
    pub fn check_orthogonality(&self) -> Vec<OrthogonalityViolation> {
        let mut out = Vec::new();
        for i in 0..self.states.len() {
            for j in (i + 1)..self.states.len() {
                let ip = self.states[i]
                    .inner_product(&self.states[j])
                    .expect("states share the set layout");
                if !ip.is_zero() {
                    out.push(OrthogonalityViolation {
                        a: self.states[i].id().to_string(),
                        b: self.states[j].id().to_string(),
                        inner_product: ip,
                    });
                }
            }
        }
        out
    }

    /// Per-party basis indices on which some state has a nonzero amplitude.
    pub fn party_supports(&self) -> Vec<Vec<usize>> {
        (0..self.spec.party_count())
            .map(|p| {
                (0..self.spec.dim(p))
                    .filter(|&i| self.states.iter().any(|s| !s.local(p)[i].is_zero()))
                    .collect()
            })
            .collect()
    }

    /// Restriction of every state to the per-party coordinate supports.
    ///
    /// Basis order within a party is preserved (ascending original index).
    /// A party keeps its factorization only if its support is full.
    pub fn support_restriction(&self) -> StateSet {
        let supports = self.party_supports();
        let dims: Vec<usize> = supports.iter().map(|s| s.len()).collect();
        let mut spec = PartySpec::new(&dims).expect("restricted dims valid");
        for (p, support) in supports.iter().enumerate() {
            if support.len() == self.spec.dim(p) && self.spec.is_factorized(p) {
                spec = spec
                    .with_factors(p, &self.spec.factor_dims(p))
                    .expect("factorization already validated");
            }
        }
        let states = self
            .states
            .iter()
            .map(|s| {
                let locals = supports
                    .iter()
                    .enumerate()
                    .map(|(p, sup)| sup.iter().map(|&i| s.local(p)[i].clone()).collect())
                    .collect();
                ProductState::new(s.id(), locals).expect("restriction keeps locals nonzero")
            })
            .collect();
        StateSet { spec, states }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OrthogonalityViolation {
    pub a: String,
    pub b: String,
    pub inner_product: Rational,
}

/// Local vector with the given `(coefficient, basis index)` terms.
fn ket(dim: usize, terms: &[(i64, usize)]) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); dim];
    for &(c, i) in terms {
        v[i] = rat(c);
    }
    v
}

fn st(id: &str, locals: Vec<Vec<Rational>>) -> ProductState {
    ProductState::new(id, locals).expect("builder states are nonzero")
}

/// The 5-state family over C³⊗C⁶ with Bob's system factored qubit⊗qutrit.
pub fn build_g1() -> StateSet {
    let spec = PartySpec::new(&[3, 6])
        .unwrap()
        .with_factors(1, &[2, 3])
        .unwrap();
    let states = vec![
        st(
            "psi1",
            vec![
                ket(3, &[(1, 0)]),
                ket(6, &[(1, 0), (-1, 1), (1, 4), (-1, 5)]),
            ],
        ),
        st(
            "psi2",
            vec![
                ket(3, &[(1, 2)]),
                ket(6, &[(1, 1), (-1, 2), (1, 5), (-1, 3)]),
            ],
        ),
        st(
            "psi3",
            vec![ket(3, &[(1, 1), (-1, 2)]), ket(6, &[(1, 0), (-1, 4)])],
        ),
        st(
            "psi4",
            vec![ket(3, &[(1, 0), (-1, 1)]), ket(6, &[(1, 2), (-1, 3)])],
        ),
        st(
            "psi5",
            vec![
                ket(3, &[(1, 0), (1, 1), (1, 2)]),
                ket(6, &[(1, 0), (1, 1), (1, 2), (1, 3), (1, 4), (1, 5)]),
            ],
        ),
    ];
    StateSet::new(spec, states).unwrap()
}

/// The 4-state tripartite family over C²⊗C²⊗C⁴ with Charlie factored 2⊗2.
pub fn build_g2() -> StateSet {
    let spec = PartySpec::new(&[2, 2, 4])
        .unwrap()
        .with_factors(2, &[2, 2])
        .unwrap();
    let states = vec![
        st(
            "phi1",
            vec![
                ket(2, &[(1, 0)]),
                ket(2, &[(1, 0), (-1, 1)]),
                ket(4, &[(1, 1), (1, 2)]),
            ],
        ),
        st(
            "phi2",
            vec![
                ket(2, &[(1, 0), (-1, 1)]),
                ket(2, &[(1, 1)]),
                ket(4, &[(1, 0), (1, 3)]),
            ],
        ),
        st(
            "phi3",
            vec![
                ket(2, &[(1, 1)]),
                ket(2, &[(1, 0)]),
                ket(4, &[(1, 0), (-1, 1), (1, 2), (-1, 3)]),
            ],
        ),
        st(
            "phi4",
            vec![
                ket(2, &[(1, 0), (1, 1)]),
                ket(2, &[(1, 0), (1, 1)]),
                ket(4, &[(1, 0), (1, 1), (1, 2), (1, 3)]),
            ],
        ),
    ];
    StateSet::new(spec, states).unwrap()
}

/// Per-party symbol of the shared 15-row layout table.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Slot {
    P,
    Q,
    R,
    /// `p ± q`, carrying the row's sign
    Eta,
    /// `p ± r`, carrying the row's sign
    Kappa,
}

use Slot::{Eta, Kappa, P, Q, R};

/// Rows of the 27-state layout: per row the three party slots; rows with an
/// Eta/Kappa slot materialize as a ± pair, the rest as singletons.
const STRONG_ROWS: [(Slot, Slot, Slot); 15] = [
    (P, Q, Eta),
    (P, R, Kappa),
    (Q, R, Eta),
    (R, Q, Kappa),
    (P, P, P),
    (Q, Eta, P),
    (R, Kappa, P),
    (R, Eta, Q),
    (Q, Kappa, R),
    (Q, Q, Q),
    (Eta, P, Q),
    (Kappa, P, R),
    (Eta, Q, R),
    (Kappa, R, Q),
    (R, R, R),
];

fn row_signs(row: &(Slot, Slot, Slot)) -> &'static [i64] {
    let has_pair = [row.0, row.1, row.2]
        .iter()
        .any(|s| matches!(s, Eta | Kappa));
    if has_pair {
        &[1, -1]
    } else {
        &[1]
    }
}

fn sign_suffix(signs: &[i64], sign: i64) -> &'static str {
    if signs.len() == 1 {
        ""
    } else if sign > 0 {
        "+"
    } else {
        "-"
    }
}

/// Interpretation of a slot symbol as a local vector on one party.
trait SlotBasis {
    fn vector(&self, slot: Slot, sign: i64) -> Vec<Rational>;
}

/// The seed interpretation in C⁶: p ↦ 𝟎−𝟒, q ↦ 𝟏−𝟓, r ↦ 𝟐−𝟑,
/// η± ↦ 𝟎±𝟏+𝟒±𝟓, κ± ↦ 𝟎±𝟐+𝟒±𝟑.
struct SeedBasis;

impl SlotBasis for SeedBasis {
    fn vector(&self, slot: Slot, sign: i64) -> Vec<Rational> {
        match slot {
            P => ket(6, &[(1, 0), (-1, 4)]),
            Q => ket(6, &[(1, 1), (-1, 5)]),
            R => ket(6, &[(1, 2), (-1, 3)]),
            Eta => ket(6, &[(1, 0), (sign, 1), (1, 4), (sign, 5)]),
            Kappa => ket(6, &[(1, 0), (sign, 2), (1, 4), (sign, 3)]),
        }
    }
}

/// The template interpretation on a chosen basis triple: p ↦ |p⟩, q ↦ |q⟩,
/// r ↦ |r⟩, η± ↦ |p⟩±|q⟩, κ± ↦ |p⟩±|r⟩, embedded in the given dimension.
struct TripleBasis {
    dim: usize,
    triple: PartyTriple,
}

impl SlotBasis for TripleBasis {
    fn vector(&self, slot: Slot, sign: i64) -> Vec<Rational> {
        let PartyTriple { p, q, r } = self.triple;
        match slot {
            P => ket(self.dim, &[(1, p)]),
            Q => ket(self.dim, &[(1, q)]),
            R => ket(self.dim, &[(1, r)]),
            Eta => ket(self.dim, &[(1, p), (sign, q)]),
            Kappa => ket(self.dim, &[(1, p), (sign, r)]),
        }
    }
}

fn strong_rows(prefix: &str, bases: [&dyn SlotBasis; 3]) -> Vec<ProductState> {
    let mut states = Vec::with_capacity(27);
    for (row_idx, row) in STRONG_ROWS.iter().enumerate() {
        let signs = row_signs(row);
        for &sign in signs {
            let id = format!("{prefix}{}{}", row_idx + 1, sign_suffix(signs, sign));
            let locals = vec![
                bases[0].vector(row.0, sign),
                bases[1].vector(row.1, sign),
                bases[2].vector(row.2, sign),
            ];
            states.push(st(&id, locals));
        }
    }
    states
}

/// The 27-state family over C⁶⊗C⁶⊗C⁶, every party factored qubit⊗qutrit.
/// Twelve ± pairs (ids suffixed `+`/`-`) and three singletons.
pub fn build_g3() -> StateSet {
    let mut spec = PartySpec::new(&[6, 6, 6]).unwrap();
    for p in 0..3 {
        spec = spec.with_factors(p, &[2, 3]).unwrap();
    }
    let states = strong_rows("xi", [&SeedBasis, &SeedBasis, &SeedBasis]);
    StateSet::new(spec, states).unwrap()
}

/// The 27-state family over C³⊗C³⊗C⁶ with Charlie factored qubit⊗qutrit.
pub fn build_g4() -> StateSet {
    let spec = PartySpec::new(&[3, 3, 6])
        .unwrap()
        .with_factors(2, &[2, 3])
        .unwrap();
    let states = g4_rows("zeta", &SeedBasis);
    StateSet::new(spec, states).unwrap()
}

/// Layout of the C³⊗C³⊗C⁶ family: A and B use fixed qutrit slots, Charlie
/// uses the shared seed/template symbols.
fn g4_rows(prefix: &str, c_basis: &dyn SlotBasis) -> Vec<ProductState> {
    // per row: (A slot, B slot, C slot); A/B slots: Fixed(i) = |i⟩,
    // Plus(i, j) = |i⟩±|j⟩ carrying the row sign
    #[derive(Clone, Copy)]
    enum Ab {
        Fixed(usize),
        Pair(usize, usize),
    }
    use Ab::{Fixed, Pair};
    let rows: [(Ab, Ab, Slot); 15] = [
        (Fixed(0), Fixed(1), Eta),
        (Fixed(0), Fixed(2), Kappa),
        (Fixed(1), Fixed(2), Eta),
        (Fixed(2), Fixed(1), Kappa),
        (Fixed(0), Fixed(0), P),
        (Fixed(1), Pair(0, 1), P),
        (Fixed(2), Pair(0, 2), P),
        (Fixed(2), Pair(0, 1), Q),
        (Fixed(1), Pair(0, 2), R),
        (Fixed(1), Fixed(1), Q),
        (Pair(0, 1), Fixed(0), Q),
        (Pair(0, 2), Fixed(0), R),
        (Pair(0, 1), Fixed(1), R),
        (Pair(0, 2), Fixed(2), Q),
        (Fixed(2), Fixed(2), R),
    ];
    let ab_vector = |slot: Ab, sign: i64| match slot {
        Fixed(i) => ket(3, &[(1, i)]),
        Pair(i, j) => ket(3, &[(1, i), (sign, j)]),
    };
    let mut states = Vec::with_capacity(27);
    for (row_idx, (a, b, c)) in rows.iter().enumerate() {
        let pair = matches!(c, Eta | Kappa) || matches!(a, Pair(..)) || matches!(b, Pair(..));
        let signs: &[i64] = if pair { &[1, -1] } else { &[1] };
        for &sign in signs {
            let id = format!("{prefix}{}{}", row_idx + 1, sign_suffix(signs, sign));
            states.push(st(
                &id,
                vec![
                    ab_vector(*a, sign),
                    ab_vector(*b, sign),
                    c_basis.vector(*c, sign),
                ],
            ));
        }
    }
    states
}

/// The five-tile C³⊗C³ unextendible product basis.
pub fn build_tiles_upb() -> StateSet {
    let spec = PartySpec::new(&[3, 3]).unwrap();
    let states = vec![
        st(
            "tiles1",
            vec![ket(3, &[(1, 0)]), ket(3, &[(1, 0), (-1, 1)])],
        ),
        st(
            "tiles2",
            vec![ket(3, &[(1, 2)]), ket(3, &[(1, 1), (-1, 2)])],
        ),
        st(
            "tiles3",
            vec![ket(3, &[(1, 1), (-1, 2)]), ket(3, &[(1, 0)])],
        ),
        st(
            "tiles4",
            vec![ket(3, &[(1, 0), (-1, 1)]), ket(3, &[(1, 2)])],
        ),
        st(
            "tiles5",
            vec![
                ket(3, &[(1, 0), (1, 1), (1, 2)]),
                ket(3, &[(1, 0), (1, 1), (1, 2)]),
            ],
        ),
    ];
    StateSet::new(spec, states).unwrap()
}

/// The four-state C²⊗C²⊗C² Shifts unextendible product basis.
pub fn build_shifts_upb() -> StateSet {
    let spec = PartySpec::new(&[2, 2, 2]).unwrap();
    let states = vec![
        st(
            "shifts1",
            vec![
                ket(2, &[(1, 0)]),
                ket(2, &[(1, 0), (-1, 1)]),
                ket(2, &[(1, 1)]),
            ],
        ),
        st(
            "shifts2",
            vec![
                ket(2, &[(1, 0), (-1, 1)]),
                ket(2, &[(1, 1)]),
                ket(2, &[(1, 0)]),
            ],
        ),
        st(
            "shifts3",
            vec![
                ket(2, &[(1, 1)]),
                ket(2, &[(1, 0)]),
                ket(2, &[(1, 0), (-1, 1)]),
            ],
        ),
        st(
            "shifts4",
            vec![
                ket(2, &[(1, 0), (1, 1)]),
                ket(2, &[(1, 0), (1, 1)]),
                ket(2, &[(1, 0), (1, 1)]),
            ],
        ),
    ];
    StateSet::new(spec, states).unwrap()
}

/// Basis triple for one party of a strong template: `p ∈ {0,4}`,
/// `q ∈ {1,5}`, `r ∈ {2,3}`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct PartyTriple {
    pub p: usize,
    pub q: usize,
    pub r: usize,
}

impl PartyTriple {
    pub fn new(p: usize, q: usize, r: usize) -> Result<Self, Error> {
        if ![0, 4].contains(&p) || ![1, 5].contains(&q) || ![2, 3].contains(&r) {
            return Err(Error::structure(format!(
                "triple ({p},{q},{r}) outside the pools p∈{{0,4}}, q∈{{1,5}}, r∈{{2,3}}"
            )));
        }
        Ok(PartyTriple { p, q, r })
    }

    /// Triple selected by a half-space outcome: the lower half picks
    /// (0,1,2), the upper half picks (4,5,3).
    pub fn for_half(upper: bool) -> PartyTriple {
        if upper {
            PartyTriple { p: 4, q: 5, r: 3 }
        } else {
            PartyTriple { p: 0, q: 1, r: 2 }
        }
    }
}

/// Index choices instantiating a strong template.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum StrongTemplateParams {
    /// One triple per party, each embedded in C⁶ (three-party template).
    Tripartite([PartyTriple; 3]),
    /// Fixed C³ structure on A and B; Charlie's triple embedded in C⁶.
    CharlieOnly(PartyTriple),
}

/// The 27-state strong template on the chosen basis indices, with
/// `η± = p±q` and `κ± = p±r` per party.
pub fn build_strong_set(params: StrongTemplateParams) -> StateSet {
    match params {
        StrongTemplateParams::Tripartite(triples) => {
            let mut spec = PartySpec::new(&[6, 6, 6]).unwrap();
            for p in 0..3 {
                spec = spec.with_factors(p, &[2, 3]).unwrap();
            }
            let bases: Vec<TripleBasis> = triples
                .iter()
                .map(|&triple| TripleBasis { dim: 6, triple })
                .collect();
            let states = strong_rows("t", [&bases[0], &bases[1], &bases[2]]);
            StateSet::new(spec, states).unwrap()
        }
        StrongTemplateParams::CharlieOnly(triple) => {
            let spec = PartySpec::new(&[3, 3, 6])
                .unwrap()
                .with_factors(2, &[2, 3])
                .unwrap();
            let states = g4_rows("t", &TripleBasis { dim: 6, triple });
            StateSet::new(spec, states).unwrap()
        }
    }
}

/// Serialize a set into the line-oriented text format:
/// a `parties` header (with the factorization clause when present), then one
/// `id | v1 | v2 | ...` line per state with comma-separated integer vectors.
pub fn write_set(set: &StateSet) -> String {
    let mut out = String::new();
    let dims: Vec<String> = set.spec().dims().iter().map(|d| d.to_string()).collect();
    write!(out, "parties {}", dims.join(" ")).unwrap();
    let factored: Vec<String> = (0..set.spec().party_count())
        .filter(|&p| set.spec().is_factorized(p))
        .map(|p| {
            let fs: Vec<String> = set
                .spec()
                .factor_dims(p)
                .iter()
                .map(|f| f.to_string())
                .collect();
            format!("p#{}: {}", p + 1, fs.join("*"))
        })
        .collect();
    if !factored.is_empty() {
        write!(out, " ; factors {}", factored.join(", ")).unwrap();
    }
    out.push('\n');
    for s in set.states() {
        let locals: Vec<String> = s
            .locals()
            .iter()
            .map(|v| {
                v.iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        writeln!(out, "{} | {}", s.id(), locals.join(" | ")).unwrap();
    }
    out
}

/// Parse the state-set text format.
pub fn parse_set(text: &str) -> Result<StateSet, Error> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(n, l)| (n + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines
        .next()
        .ok_or_else(|| Error::parse(0, "empty state-set file"))?;
    let mut parts = header.splitn(2, ';');
    let head = parts.next().unwrap().trim();
    let dims_str = head
        .strip_prefix("parties")
        .ok_or_else(|| Error::parse(hline, "header must start with 'parties'"))?;
    let dims: Vec<usize> = dims_str
        .split_whitespace()
        .map(|t| {
            t.parse()
                .map_err(|_| Error::parse(hline, format!("bad dimension {t:?}")))
        })
        .collect::<Result<_, _>>()?;
    let mut spec = PartySpec::new(&dims).map_err(|e| Error::parse(hline, e.to_string()))?;
    if let Some(rest) = parts.next() {
        let rest = rest.trim();
        let body = rest
            .strip_prefix("factors")
            .ok_or_else(|| Error::parse(hline, "expected 'factors' clause"))?;
        for clause in body.split(',') {
            let clause = clause.trim();
            let (label, fs) = clause
                .split_once(':')
                .ok_or_else(|| Error::parse(hline, format!("bad factors clause {clause:?}")))?;
            let party: usize = label
                .trim()
                .strip_prefix("p#")
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::parse(hline, format!("bad party label {label:?}")))?;
            let factors: Vec<usize> = fs
                .trim()
                .split('*')
                .map(|t| {
                    t.trim()
                        .parse()
                        .map_err(|_| Error::parse(hline, format!("bad factor dim {t:?}")))
                })
                .collect::<Result<_, _>>()?;
            if party == 0 {
                return Err(Error::parse(hline, "party labels are 1-based"));
            }
            spec = spec
                .with_factors(party - 1, &factors)
                .map_err(|e| Error::parse(hline, e.to_string()))?;
        }
    }

    let mut states = Vec::new();
    for (n, line) in lines {
        let mut fields = line.split('|').map(str::trim);
        let id = fields
            .next()
            .filter(|s| !s.is_empty())
            .ok_or_else(|| Error::parse(n, "missing state id"))?;
        let locals: Vec<Vec<Rational>> = fields
            .map(|f| parse_vector(n, f))
            .collect::<Result<_, _>>()?;
        if locals.len() != dims.len() {
            return Err(Error::parse(
                n,
                format!(
                    "state {id} has {} locals, expected {}",
                    locals.len(),
                    dims.len()
                ),
            ));
        }
        states.push(ProductState::new(id, locals).map_err(|e| Error::parse(n, e.to_string()))?);
    }
    StateSet::new(spec, states).map_err(|e| Error::parse(0, e.to_string()))
}

fn parse_vector(line: usize, field: &str) -> Result<Vec<Rational>, Error> {
    field
        .split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<Rational>()
                .map_err(|_| Error::parse(line, format!("bad amplitude {t:?}")))
        })
        .collect()
}

/// Built-in set by CLI name: `g1`..`g4`, `tiles`, `shifts` or
/// `strong:<params>` (see [`parse_strong_params`]).
pub fn built_in(name: &str) -> Result<StateSet, Error> {
    match name {
        "g1" => Ok(build_g1()),
        "g2" => Ok(build_g2()),
        "g3" => Ok(build_g3()),
        "g4" => Ok(build_g4()),
        "tiles" => Ok(build_tiles_upb()),
        "shifts" => Ok(build_shifts_upb()),
        _ => {
            if let Some(params) = name.strip_prefix("strong:") {
                Ok(build_strong_set(parse_strong_params(params)?))
            } else {
                Err(Error::structure(format!("unknown set name {name:?}")))
            }
        }
    }
}

/// Parse strong-template parameters:
/// `p,q,r` (the same triple on all three parties),
/// `pA,qA,rA;pB,qB,rB;pC,qC,rC` (one triple per party), or
/// `c:p,q,r` (Charlie-only template over C³⊗C³⊗C⁶).
pub fn parse_strong_params(text: &str) -> Result<StrongTemplateParams, Error> {
    fn triple(part: &str) -> Result<PartyTriple, Error> {
        let nums: Vec<usize> = part
            .split(',')
            .map(|t| {
                t.trim()
                    .parse()
                    .map_err(|_| Error::structure(format!("bad index {t:?} in strong params")))
            })
            .collect::<Result<_, _>>()?;
        if nums.len() != 3 {
            return Err(Error::structure(format!(
                "expected three indices per party, got {part:?}"
            )));
        }
        PartyTriple::new(nums[0], nums[1], nums[2])
    }

    if let Some(rest) = text.strip_prefix("c:") {
        return Ok(StrongTemplateParams::CharlieOnly(triple(rest)?));
    }
    let parts: Vec<&str> = text.split(';').collect();
    match parts.len() {
        1 => {
            let t = triple(parts[0])?;
            Ok(StrongTemplateParams::Tripartite([t, t, t]))
        }
        3 => Ok(StrongTemplateParams::Tripartite([
            triple(parts[0])?,
            triple(parts[1])?,
            triple(parts[2])?,
        ])),
        _ => Err(Error::structure(
            "strong params need one triple or three ';'-separated triples",
        )),
    }
}
