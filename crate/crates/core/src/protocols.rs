//! Adaptive LOCC discrimination protocol trees and a simulator that replays
//! them against a state set.
//!
//! A tree node is one party performing a complete projective measurement;
//! every outcome leads to a child node or a leaf holding the candidate ids.
//! A one-candidate leaf is an identification; a two-candidate leaf stands on
//! the rule that two orthogonal pure states are always locally
//! distinguishable, whose internal steps are not simulated.
//!
//! The simulator walks every state down every outcome it has support in, so
//! protocols where a state can fire two outcomes are replayed faithfully;
//! such branchings are recorded per node and listed in the report rather
//! than folded into the discrimination verdict.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::Zero;

use crate::error::Error;
use crate::exactla::normalize_primitive;
use crate::hilbert::{local_ratio, PartySpec, ProductState};
use crate::measurements::{
    is_orthogonality_preserving, parse_measurement, span_of, write_measurement, Measurement,
    OutcomeSpec,
};
use crate::statesets::{build_g3, StateSet};

#[derive(Clone, Debug)]
pub enum ProtocolTree {
    Node(Box<ProtocolNode>),
    Leaf(LeafNode),
}

#[derive(Clone, Debug)]
pub struct ProtocolNode {
    pub party: usize,
    pub measurement: Measurement,
    pub children: Vec<(String, ProtocolTree)>,
}

#[derive(Clone, Debug)]
pub struct LeafNode {
    pub candidates: Vec<String>,
}

impl ProtocolTree {
    pub fn leaf(mut candidates: Vec<String>) -> Self {
        candidates.sort();
        ProtocolTree::Leaf(LeafNode { candidates })
    }

    pub fn node(
        party: usize,
        measurement: Measurement,
        children: Vec<(String, ProtocolTree)>,
    ) -> Self {
        ProtocolTree::Node(Box::new(ProtocolNode {
            party,
            measurement,
            children,
        }))
    }

    /// Union of candidate ids over all leaves.
    pub fn leaf_union(&self) -> Vec<String> {
        let mut ids = Vec::new();
        self.collect_leaves(&mut ids);
        ids.sort();
        ids.dedup();
        ids
    }

    fn collect_leaves(&self, ids: &mut Vec<String>) {
        match self {
            ProtocolTree::Leaf(l) => ids.extend(l.candidates.iter().cloned()),
            ProtocolTree::Node(n) => {
                for (_, c) in &n.children {
                    c.collect_leaves(ids);
                }
            }
        }
    }

    /// Structural validation against a party layout.
    pub fn validate(&self, spec: &PartySpec) -> Result<(), Error> {
        match self {
            ProtocolTree::Leaf(_) => Ok(()),
            ProtocolTree::Node(n) => {
                if n.party >= spec.party_count() {
                    return Err(Error::MalformedTree(format!(
                        "node measures party {} but the set has {} parties",
                        n.party,
                        spec.party_count()
                    )));
                }
                if n.measurement.target() != [n.party] {
                    return Err(Error::MalformedTree(format!(
                        "measurement {} does not act locally on party {}",
                        n.measurement.name(),
                        PartySpec::party_name(n.party)
                    )));
                }
                if !n.measurement.is_complete(spec.dim(n.party)) {
                    return Err(Error::MalformedTree(format!(
                        "measurement {} is not complete on party {}",
                        n.measurement.name(),
                        PartySpec::party_name(n.party)
                    )));
                }
                let mut expected: Vec<&str> =
                    n.measurement.outcomes().iter().map(|o| o.label()).collect();
                let mut got: Vec<&str> = n.children.iter().map(|(l, _)| l.as_str()).collect();
                expected.sort();
                got.sort();
                if expected != got {
                    return Err(Error::MalformedTree(format!(
                        "children of {} do not cover its outcomes exactly",
                        n.measurement.name()
                    )));
                }
                for (_, c) in &n.children {
                    c.validate(spec)?;
                }
                Ok(())
            }
        }
    }
}

/// Per-node record of one simulation.
#[derive(Clone, Debug)]
pub struct NodeReport {
    pub party: usize,
    pub measurement: String,
    pub candidates: Vec<String>,
    pub orthogonality_preserving: bool,
    pub deterministic: bool,
}

/// Per-leaf record: declared candidates vs the set computed by candidate
/// bookkeeping along the path.
#[derive(Clone, Debug)]
pub struct LeafReport {
    pub declared: Vec<String>,
    pub computed: Vec<String>,
    pub bookkeeping_ok: bool,
}

/// One root-to-leaf walk of a state.
#[derive(Clone, Debug)]
pub struct StatePath {
    pub outcomes: Vec<String>,
    pub leaf: String,
    pub leaf_size: usize,
    pub contained: bool,
}

#[derive(Clone, Debug)]
pub struct StateReport {
    pub paths: Vec<StatePath>,
    pub distinguished: bool,
    pub deterministic: bool,
}

#[derive(Clone, Debug)]
pub struct NondeterministicBranch {
    pub state: String,
    pub node: String,
    pub outcomes: Vec<String>,
}

#[derive(Clone, Debug, Default)]
pub struct SimulationReport {
    /// keyed by state id
    pub states: BTreeMap<String, StateReport>,
    /// keyed by node path ("root", "root/P1", ...)
    pub nodes: BTreeMap<String, NodeReport>,
    /// keyed by leaf path
    pub leaves: BTreeMap<String, LeafReport>,
    pub nondeterministic: Vec<NondeterministicBranch>,
}

impl SimulationReport {
    pub fn all_distinguished(&self) -> bool {
        self.states.values().all(|s| s.distinguished)
    }

    pub fn all_deterministic(&self) -> bool {
        self.nondeterministic.is_empty()
    }

    pub fn all_orthogonality_preserving(&self) -> bool {
        self.nodes.values().all(|n| n.orthogonality_preserving)
    }

    pub fn max_leaf_candidates(&self) -> usize {
        self.leaves
            .values()
            .map(|l| l.declared.len())
            .max()
            .unwrap_or(0)
    }

    pub fn bookkeeping_ok(&self) -> bool {
        self.leaves.values().all(|l| l.bookkeeping_ok)
    }
}

/// Walk every state of `s` through the tree `t`.
///
/// At each node the simulator verifies that the node measurement restricted
/// to the current candidates preserves orthogonality, records whether every
/// candidate has support in exactly one outcome, and checks at each leaf
/// that the declared candidate set equals the states with nonzero support
/// along the path. A state counts as distinguished when every leaf it can
/// reach contains it with at most two candidates and no orthogonality or
/// bookkeeping check failed on its way there.
pub fn simulate(s: &StateSet, t: &ProtocolTree) -> Result<SimulationReport, Error> {
    t.validate(s.spec())?;
    let mut report = SimulationReport::default();
    let all: Vec<ProductState> = s.states().to_vec();
    walk(s.spec(), t, "root".to_string(), all, &mut report)?;

    // assemble per-state verdicts
    for st in s.states() {
        let id = st.id().to_string();
        let paths: Vec<StatePath> = report
            .leaves
            .iter()
            .filter(|(_, leaf)| leaf.computed.contains(&id))
            .map(|(path, leaf)| StatePath {
                outcomes: path.split('/').skip(1).map(|s| s.to_string()).collect(),
                leaf: path.clone(),
                leaf_size: leaf.declared.len(),
                contained: leaf.declared.contains(&id),
            })
            .collect();
        let visited_ok = report
            .nodes
            .iter()
            .filter(|(_, n)| n.candidates.contains(&id))
            .all(|(_, n)| n.orthogonality_preserving);
        let leaves_ok = !paths.is_empty()
            && paths
                .iter()
                .all(|p| p.contained && p.leaf_size <= 2 && report.leaves[&p.leaf].bookkeeping_ok);
        let deterministic = !report.nondeterministic.iter().any(|n| n.state == id);
        report.states.insert(
            id,
            StateReport {
                paths,
                distinguished: visited_ok && leaves_ok,
                deterministic,
            },
        );
    }
    Ok(report)
}

fn walk(
    spec: &PartySpec,
    tree: &ProtocolTree,
    path: String,
    candidates: Vec<ProductState>,
    report: &mut SimulationReport,
) -> Result<(), Error> {
    match tree {
        ProtocolTree::Leaf(leaf) => {
            let mut computed: Vec<String> = candidates.iter().map(|c| c.id().to_string()).collect();
            computed.sort();
            let mut declared = leaf.candidates.clone();
            declared.sort();
            let bookkeeping_ok = computed == declared;
            report.leaves.insert(
                path,
                LeafReport {
                    declared,
                    computed,
                    bookkeeping_ok,
                },
            );
            Ok(())
        }
        ProtocolTree::Node(node) => {
            let m = &node.measurement;
            let op = if candidates.is_empty() {
                true
            } else {
                let sub = StateSet::new(spec.clone(), candidates.clone())?;
                is_orthogonality_preserving(&sub, m)?
            };

            // support pattern per candidate
            let mut supported: Vec<(usize, Vec<&str>)> = Vec::new();
            for (ci, cand) in candidates.iter().enumerate() {
                let u = cand.local(node.party);
                let labels: Vec<&str> = m
                    .outcomes()
                    .iter()
                    .filter(|o| !o.projector().entries().bilinear(u, u).is_zero())
                    .map(|o| o.label())
                    .collect();
                if labels.len() != 1 {
                    report.nondeterministic.push(NondeterministicBranch {
                        state: cand.id().to_string(),
                        node: path.clone(),
                        outcomes: labels.iter().map(|l| l.to_string()).collect(),
                    });
                }
                supported.push((ci, labels));
            }
            let deterministic = supported.iter().all(|(_, l)| l.len() == 1);
            report.nodes.insert(
                path.clone(),
                NodeReport {
                    party: node.party,
                    measurement: m.name().to_string(),
                    candidates: candidates.iter().map(|c| c.id().to_string()).collect(),
                    orthogonality_preserving: op,
                    deterministic,
                },
            );

            for (label, child) in &node.children {
                let outcome = m.outcome(label).expect("validated above");
                let mut next = Vec::new();
                for (ci, labels) in &supported {
                    if labels.contains(&label.as_str()) {
                        let cand = &candidates[*ci];
                        let mut local = outcome.projector().apply(cand.local(node.party));
                        normalize_primitive(&mut local);
                        next.push(cand.with_local(node.party, local)?);
                    }
                }
                walk(spec, child, format!("{path}/{label}"), next, report)?;
            }
            Ok(())
        }
    }
}

// --- measurement constructors shared by the protocol builders ---

fn e(dim: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0; dim];
    v[i] = 1;
    v
}

/// The C⁶ measurement {P[𝟎−𝟒], P[𝟏−𝟓], P[𝟐−𝟑], complement}.
pub fn m1_c6(name: impl Into<String>, party: usize) -> Measurement {
    Measurement::local(
        name,
        party,
        6,
        vec![
            ("P1".into(), span_of(&[&[1, 0, 0, 0, -1, 0]])),
            ("P2".into(), span_of(&[&[0, 1, 0, 0, 0, -1]])),
            ("P3".into(), span_of(&[&[0, 0, 1, -1, 0, 0]])),
            ("P4".into(), OutcomeSpec::Complement),
        ],
    )
    .expect("static measurement")
}

/// The C⁶ measurement {P[𝟎+𝟏+𝟒+𝟓], P[𝟎−𝟏+𝟒−𝟓], complement}.
pub fn m2_c6(name: impl Into<String>, party: usize) -> Measurement {
    Measurement::local(
        name,
        party,
        6,
        vec![
            ("Q1".into(), span_of(&[&[1, 1, 0, 0, 1, 1]])),
            ("Q2".into(), span_of(&[&[1, -1, 0, 0, 1, -1]])),
            ("Q3".into(), OutcomeSpec::Complement),
        ],
    )
    .expect("static measurement")
}

/// The C⁶ measurement {P[𝟎+𝟐+𝟒+𝟑], P[𝟎−𝟐+𝟒−𝟑], complement}.
pub fn m3_c6(name: impl Into<String>, party: usize) -> Measurement {
    Measurement::local(
        name,
        party,
        6,
        vec![
            ("R1".into(), span_of(&[&[1, 0, 1, 1, 1, 0]])),
            ("R2".into(), span_of(&[&[1, 0, -1, -1, 1, 0]])),
            ("R3".into(), OutcomeSpec::Complement),
        ],
    )
    .expect("static measurement")
}

fn basis_measurement(name: &str, party: usize, dim: usize, labels: &[&str]) -> Measurement {
    assert_eq!(labels.len(), dim);
    Measurement::local(
        name,
        party,
        dim,
        labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.to_string(), span_of(&[&e(dim, i)])))
            .collect(),
    )
    .expect("static measurement")
}

fn two_block_measurement(
    name: &str,
    party: usize,
    dim: usize,
    first: (&str, &[usize]),
    second: (&str, &[usize]),
) -> Measurement {
    let block = |idxs: &[usize]| {
        OutcomeSpec::Span(
            idxs.iter()
                .map(|&i| e(dim, i).iter().map(|&x| crate::exactla::rat(x)).collect())
                .collect(),
        )
    };
    Measurement::local(
        name,
        party,
        dim,
        vec![
            (first.0.to_string(), block(first.1)),
            (second.0.to_string(), block(second.1)),
        ],
    )
    .expect("static measurement")
}

/// Root measurement of the 5-state C³⊗C⁶ protocol: Bob distinguishes the
/// difference vectors 𝟎−𝟒 and 𝟐−𝟑, the all-ones vector, and the rest.
pub fn n_b_measurement() -> Measurement {
    Measurement::local(
        "N_B",
        1,
        6,
        vec![
            ("N1".into(), span_of(&[&[1, 0, 0, 0, -1, 0]])),
            ("N2".into(), span_of(&[&[0, 0, 1, -1, 0, 0]])),
            ("N3".into(), span_of(&[&[1, 1, 1, 1, 1, 1]])),
            ("N4".into(), OutcomeSpec::Complement),
        ],
    )
    .expect("static measurement")
}

/// Charlie's C⁴ root measurement of the 4-state tripartite protocol: the
/// four rank-1 projectors onto 𝟎±𝟑 and 𝟏±𝟐.
pub fn k_c_measurement() -> Measurement {
    Measurement::local(
        "K_C",
        2,
        4,
        vec![
            ("K1".into(), span_of(&[&[1, 0, 0, 1]])),
            ("K2".into(), span_of(&[&[1, 0, 0, -1]])),
            ("K3".into(), span_of(&[&[0, 1, 1, 0]])),
            ("K4".into(), span_of(&[&[0, 1, -1, 0]])),
        ],
    )
    .expect("static measurement")
}

fn leaf_of(ids: &[&str]) -> ProtocolTree {
    ProtocolTree::leaf(ids.iter().map(|s| s.to_string()).collect())
}

/// Protocol for the 5-state C³⊗C⁶ family: one measurement by Bob; the
/// leftover pair {psi1, psi2} falls to the two-orthogonal-states rule.
pub fn build_g1_protocol() -> ProtocolTree {
    ProtocolTree::node(
        1,
        n_b_measurement(),
        vec![
            ("N1".into(), leaf_of(&["psi3"])),
            ("N2".into(), leaf_of(&["psi4"])),
            ("N3".into(), leaf_of(&["psi5"])),
            ("N4".into(), leaf_of(&["psi1", "psi2"])),
        ],
    )
}

/// Protocol for the 4-state C²⊗C²⊗C⁴ family: one measurement by Charlie.
///
/// Support arithmetic fixes the K2 leaf at {phi3}: ⟨𝟎−𝟑|𝟎+𝟑⟩ = 0, so phi2
/// can never fire K2, while phi3's C component 𝟎−𝟏+𝟐−𝟑 overlaps 𝟎−𝟑. Note
/// that phi3 also fires K4 and phi4 fires both K1 and K3; the root is
/// genuinely not a deterministic branching, each reachable leaf just happens
/// to identify the state within two candidates.
pub fn build_g2_protocol() -> ProtocolTree {
    ProtocolTree::node(
        2,
        k_c_measurement(),
        vec![
            ("K1".into(), leaf_of(&["phi2", "phi4"])),
            ("K2".into(), leaf_of(&["phi3"])),
            ("K3".into(), leaf_of(&["phi1", "phi4"])),
            ("K4".into(), leaf_of(&["phi3"])),
        ],
    )
}

/// Protocol for the 27-state C⁶⊗C⁶⊗C⁶ family, reconstructed from the
/// published measurements: Alice, Bob and (where still needed) Charlie run
/// the difference-projector measurement in turn, and the surviving ± pairs
/// are separated by the matching sum-projector measurement on the party
/// where they differ. The reconstruction is validated behaviorally by
/// [`simulate`].
pub fn build_g3_protocol() -> ProtocolTree {
    let set = build_g3();
    grow_g3(&set, set.states().to_vec(), 0)
}

fn grow_g3(set: &StateSet, candidates: Vec<ProductState>, level: usize) -> ProtocolTree {
    if candidates.len() <= 1 {
        return ProtocolTree::leaf(candidates.iter().map(|c| c.id().to_string()).collect());
    }
    if candidates.len() == 2 {
        if let Some(node) = resolve_pair(&candidates) {
            return node;
        }
        return ProtocolTree::leaf(candidates.iter().map(|c| c.id().to_string()).collect());
    }
    assert!(level < 3, "difference measurements exhausted before pairs");
    let party = level;
    let m = m1_c6(format!("M1^{}", PartySpec::party_name(party)), party);
    let children = split_children(
        set,
        &candidates,
        party,
        &m,
        |next, lvl| grow_g3(set, next, lvl),
        level + 1,
    );
    ProtocolTree::node(party, m, children)
}

fn split_children(
    _set: &StateSet,
    candidates: &[ProductState],
    party: usize,
    m: &Measurement,
    recurse: impl Fn(Vec<ProductState>, usize) -> ProtocolTree,
    next_level: usize,
) -> Vec<(String, ProtocolTree)> {
    let mut children = Vec::new();
    for outcome in m.outcomes() {
        let mut next = Vec::new();
        for cand in candidates {
            let u = cand.local(party);
            if outcome.projector().entries().bilinear(u, u).is_zero() {
                continue;
            }
            let mut local = outcome.projector().apply(u);
            normalize_primitive(&mut local);
            next.push(cand.with_local(party, local).expect("projection nonzero"));
        }
        children.push((outcome.label().to_string(), recurse(next, next_level)));
    }
    children
}

/// Separate a ± pair by the sum-projector measurement on the party where the
/// two candidates differ; tried for both sum bases.
fn resolve_pair(candidates: &[ProductState]) -> Option<ProtocolTree> {
    let parties = candidates[0].party_dims().len();
    let differing = (0..parties)
        .find(|&p| local_ratio(candidates[0].local(p), candidates[1].local(p)).is_none())?;
    for m in [
        m2_c6(
            format!("M2^{}", PartySpec::party_name(differing)),
            differing,
        ),
        m3_c6(
            format!("M3^{}", PartySpec::party_name(differing)),
            differing,
        ),
    ] {
        let mut hit: Vec<Option<&str>> = vec![None, None];
        let mut clean = true;
        for (ci, cand) in candidates.iter().enumerate() {
            let u = cand.local(differing);
            let labels: Vec<&str> = m
                .outcomes()
                .iter()
                .filter(|o| !o.projector().entries().bilinear(u, u).is_zero())
                .map(|o| o.label())
                .collect();
            if labels.len() == 1 {
                hit[ci] = Some(labels[0]);
            } else {
                clean = false;
            }
        }
        if !clean || hit[0] == hit[1] {
            continue;
        }
        let children = m
            .outcomes()
            .iter()
            .map(|o| {
                let ids: Vec<String> = candidates
                    .iter()
                    .zip(&hit)
                    .filter(|(_, h)| **h == Some(o.label()))
                    .map(|(c, _)| c.id().to_string())
                    .collect();
                (o.label().to_string(), ProtocolTree::leaf(ids))
            })
            .collect();
        return Some(ProtocolTree::node(differing, m, children));
    }
    None
}

/// Protocol for the 27-state C³⊗C³⊗C⁶ family: Charlie's difference
/// measurement first, then the published per-branch measurement sequences,
/// ending in leaves of at most two candidates.
pub fn build_g4_protocol() -> ProtocolTree {
    // branch P1: Alice separates zeta5 from the zeta6/zeta7 pairs
    let p1 = ProtocolTree::node(
        0,
        basis_measurement("M1^A", 0, 3, &["P1", "P2", "P3"]),
        vec![
            ("P1".into(), leaf_of(&["zeta5"])),
            ("P2".into(), leaf_of(&["zeta6+", "zeta6-"])),
            ("P3".into(), leaf_of(&["zeta7+", "zeta7-"])),
        ],
    );

    // branch P2: Bob {01|2}, Alice {01|2}, Bob basis
    let p2_b2 = ProtocolTree::node(
        1,
        basis_measurement("M2^B", 1, 3, &["Q1", "Q2", "Q3"]),
        vec![
            ("Q1".into(), leaf_of(&["zeta11+", "zeta11-"])),
            ("Q2".into(), leaf_of(&["zeta10"])),
            ("Q3".into(), leaf_of(&[])),
        ],
    );
    let p2_a = ProtocolTree::node(
        0,
        two_block_measurement("M2^A", 0, 3, ("Q1", &[0, 1]), ("Q2", &[2])),
        vec![
            ("Q1".into(), p2_b2),
            ("Q2".into(), leaf_of(&["zeta8+", "zeta8-"])),
        ],
    );
    let p2 = ProtocolTree::node(
        1,
        two_block_measurement("M1^B", 1, 3, ("P1", &[0, 1]), ("P2", &[2])),
        vec![
            ("P1".into(), p2_a),
            ("P2".into(), leaf_of(&["zeta14+", "zeta14-"])),
        ],
    );

    // branch P3: Bob {02|1}, Alice {02|1}, Bob basis
    let p3_b4 = ProtocolTree::node(
        1,
        basis_measurement("M4^B", 1, 3, &["N1", "N2", "N3"]),
        vec![
            ("N1".into(), leaf_of(&["zeta12+", "zeta12-"])),
            ("N2".into(), leaf_of(&[])),
            ("N3".into(), leaf_of(&["zeta15"])),
        ],
    );
    let p3_a = ProtocolTree::node(
        0,
        two_block_measurement("M2R^A", 0, 3, ("R1", &[0, 2]), ("R2", &[1])),
        vec![
            ("R1".into(), p3_b4),
            ("R2".into(), leaf_of(&["zeta9+", "zeta9-"])),
        ],
    );
    let p3 = ProtocolTree::node(
        1,
        two_block_measurement("M3^B", 1, 3, ("T1", &[0, 2]), ("T2", &[1])),
        vec![
            ("T1".into(), p3_a),
            ("T2".into(), leaf_of(&["zeta13+", "zeta13-"])),
        ],
    );

    // branch P4: Alice basis, then Bob basis on the zeta1/zeta2 block
    let p4_b = ProtocolTree::node(
        1,
        basis_measurement("M5^B", 1, 3, &["L1", "L2", "L3"]),
        vec![
            ("L1".into(), leaf_of(&[])),
            ("L2".into(), leaf_of(&["zeta1+", "zeta1-"])),
            ("L3".into(), leaf_of(&["zeta2+", "zeta2-"])),
        ],
    );
    let p4 = ProtocolTree::node(
        0,
        basis_measurement("M3^A", 0, 3, &["T1", "T2", "T3"]),
        vec![
            ("T1".into(), p4_b),
            ("T2".into(), leaf_of(&["zeta3+", "zeta3-"])),
            ("T3".into(), leaf_of(&["zeta4+", "zeta4-"])),
        ],
    );

    ProtocolTree::node(
        2,
        m1_c6("M1^C", 2),
        vec![
            ("P1".into(), p1),
            ("P2".into(), p2),
            ("P3".into(), p3),
            ("P4".into(), p4),
        ],
    )
}

// --- text format ---

/// Serialize a protocol tree: one `measure <name> <measurement>` line per
/// distinct measurement, then the nested node expression
/// `node party=A measure=<name> { K1 -> ..., K2 -> leaf{...} }`.
pub fn write_protocol(t: &ProtocolTree) -> String {
    let mut measurements: BTreeMap<String, String> = BTreeMap::new();
    collect_measurements(t, &mut measurements);
    let mut out = String::new();
    for (name, text) in &measurements {
        writeln!(out, "measure {name} {text}").unwrap();
    }
    write_tree(t, 0, &mut out);
    out.push('\n');
    out
}

fn collect_measurements(t: &ProtocolTree, acc: &mut BTreeMap<String, String>) {
    if let ProtocolTree::Node(n) = t {
        acc.insert(
            n.measurement.name().to_string(),
            write_measurement(&n.measurement),
        );
        for (_, c) in &n.children {
            collect_measurements(c, acc);
        }
    }
}

fn write_tree(t: &ProtocolTree, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match t {
        ProtocolTree::Leaf(l) => {
            write!(out, "leaf{{{}}}", l.candidates.join(",")).unwrap();
        }
        ProtocolTree::Node(n) => {
            write!(
                out,
                "node party={} measure={} {{",
                PartySpec::party_name(n.party),
                n.measurement.name()
            )
            .unwrap();
            for (i, (label, child)) in n.children.iter().enumerate() {
                write!(out, "\n{pad}  {label} -> ").unwrap();
                write_tree(child, indent + 1, out);
                if i + 1 < n.children.len() {
                    out.push(',');
                }
            }
            write!(out, "\n{pad}}}").unwrap();
        }
    }
}

/// Parse the protocol text format.
pub fn parse_protocol(text: &str) -> Result<ProtocolTree, Error> {
    let mut measurements: BTreeMap<String, Measurement> = BTreeMap::new();
    let mut tree_text = String::new();
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("measure ") {
            let (name, body) = rest
                .split_once(' ')
                .ok_or_else(|| Error::parse(lineno + 1, "measure line needs a name and a body"))?;
            let m = parse_measurement(name.trim(), body)?;
            measurements.insert(name.trim().to_string(), m);
        } else {
            tree_text.push_str(line);
            tree_text.push('\n');
        }
    }
    let tokens = lex(&tree_text);
    let mut cursor = 0;
    let tree = parse_tree(&tokens, &mut cursor, &measurements)?;
    if cursor != tokens.len() {
        return Err(Error::parse(0, "trailing tokens after protocol tree"));
    }
    Ok(tree)
}

#[derive(Debug, PartialEq, Clone)]
enum Tok {
    Word(String),
    Open,
    Close,
    Comma,
    Arrow,
}

fn lex(text: &str) -> Vec<Tok> {
    let mut out = Vec::new();
    let mut word = String::new();
    let mut chars = text.chars().peekable();
    let flush = |word: &mut String, out: &mut Vec<Tok>| {
        if !word.is_empty() {
            out.push(Tok::Word(std::mem::take(word)));
        }
    };
    while let Some(c) = chars.next() {
        match c {
            '{' => {
                flush(&mut word, &mut out);
                out.push(Tok::Open);
            }
            '}' => {
                flush(&mut word, &mut out);
                out.push(Tok::Close);
            }
            ',' => {
                flush(&mut word, &mut out);
                out.push(Tok::Comma);
            }
            '-' if chars.peek() == Some(&'>') => {
                chars.next();
                flush(&mut word, &mut out);
                out.push(Tok::Arrow);
            }
            c if c.is_whitespace() => flush(&mut word, &mut out),
            c => word.push(c),
        }
    }
    flush(&mut word, &mut out);
    out
}

fn parse_tree(
    tokens: &[Tok],
    cursor: &mut usize,
    measurements: &BTreeMap<String, Measurement>,
) -> Result<ProtocolTree, Error> {
    let word = next_word(tokens, cursor)?;
    if word == "leaf" {
        expect(tokens, cursor, Tok::Open)?;
        let mut ids = Vec::new();
        loop {
            match tokens.get(*cursor) {
                Some(Tok::Close) => {
                    *cursor += 1;
                    break;
                }
                Some(Tok::Comma) => {
                    *cursor += 1;
                }
                Some(Tok::Word(w)) => {
                    ids.push(w.clone());
                    *cursor += 1;
                }
                other => {
                    return Err(Error::parse(
                        0,
                        format!("unexpected token in leaf: {other:?}"),
                    ))
                }
            }
        }
        return Ok(ProtocolTree::leaf(ids));
    }
    if word != "node" {
        return Err(Error::parse(
            0,
            format!("expected node or leaf, got {word:?}"),
        ));
    }
    let party_kv = next_word(tokens, cursor)?;
    let party_name = party_kv
        .strip_prefix("party=")
        .ok_or_else(|| Error::parse(0, "expected party=<letter>"))?;
    let party = PartySpec::party_from_name(party_name)
        .ok_or_else(|| Error::parse(0, format!("bad party {party_name:?}")))?;
    let measure_kv = next_word(tokens, cursor)?;
    let mname = measure_kv
        .strip_prefix("measure=")
        .ok_or_else(|| Error::parse(0, "expected measure=<name>"))?;
    let measurement = measurements
        .get(mname)
        .ok_or_else(|| Error::parse(0, format!("undefined measurement {mname:?}")))?
        .clone();
    expect(tokens, cursor, Tok::Open)?;
    let mut children = Vec::new();
    loop {
        match tokens.get(*cursor) {
            Some(Tok::Close) => {
                *cursor += 1;
                break;
            }
            Some(Tok::Comma) => {
                *cursor += 1;
            }
            Some(Tok::Word(_)) => {
                let label = next_word(tokens, cursor)?;
                expect(tokens, cursor, Tok::Arrow)?;
                let child = parse_tree(tokens, cursor, measurements)?;
                children.push((label, child));
            }
            other => {
                return Err(Error::parse(
                    0,
                    format!("unexpected token in node: {other:?}"),
                ))
            }
        }
    }
    Ok(ProtocolTree::node(party, measurement, children))
}

fn next_word(tokens: &[Tok], cursor: &mut usize) -> Result<String, Error> {
    match tokens.get(*cursor) {
        Some(Tok::Word(w)) => {
            *cursor += 1;
            Ok(w.clone())
        }
        other => Err(Error::parse(0, format!("expected a word, got {other:?}"))),
    }
}

fn expect(tokens: &[Tok], cursor: &mut usize, tok: Tok) -> Result<(), Error> {
    if tokens.get(*cursor) == Some(&tok) {
        *cursor += 1;
        Ok(())
    } else {
        Err(Error::parse(
            0,
            format!("expected {tok:?}, got {:?}", tokens.get(*cursor)),
        ))
    }
}

#[cfg(test)]
mod tests {
    use crate::exactla::rvec;
    use crate::statesets::{build_g1, build_g2, build_g4};

    use super::*;

    #[test]
    fn g1_protocol_layout() {
        let t = build_g1_protocol();
        let ProtocolTree::Node(root) = &t else {
            panic!("root must be a node")
        };
        let find = |l: &str| {
            root.children
                .iter()
                .find(|(label, _)| label == l)
                .map(|(_, c)| match c {
                    ProtocolTree::Leaf(leaf) => leaf.candidates.clone(),
                    _ => panic!("expected leaf"),
                })
                .unwrap()
        };
        assert_eq!(find("N3"), vec!["psi5"]);
        assert_eq!(find("N4"), vec!["psi1", "psi2"]);
        t.validate(build_g1().spec()).unwrap();
    }

    #[test]
    fn g1_simulation() {
        let report = simulate(&build_g1(), &build_g1_protocol()).unwrap();
        assert!(report.all_distinguished());
        assert!(report.all_deterministic());
        assert!(report.bookkeeping_ok());
        let psi3 = &report.states["psi3"];
        assert_eq!(psi3.paths.len(), 1);
        assert_eq!(psi3.paths[0].outcomes, vec!["N1"]);
    }

    #[test]
    fn g2_simulation_identifies_all_but_branches_nondeterministically() {
        let report = simulate(&build_g2(), &build_g2_protocol()).unwrap();
        assert!(report.all_distinguished());
        assert!(report.bookkeeping_ok());
        assert!(report.all_orthogonality_preserving());
        // phi3 fires K2 and K4; phi4 fires K1 and K3. The root measurement
        // is genuinely not support-deterministic on this family.
        assert!(!report.all_deterministic());
        let offenders: Vec<&str> = report
            .nondeterministic
            .iter()
            .map(|n| n.state.as_str())
            .collect();
        assert_eq!(offenders, vec!["phi3", "phi4"]);
        assert_eq!(report.states["phi3"].paths.len(), 2);
        assert!(report.states["phi1"].deterministic);
        assert!(!report.states["phi4"].deterministic);
    }

    #[test]
    fn g3_simulation() {
        let set = build_g3();
        let t = build_g3_protocol();
        t.validate(set.spec()).unwrap();
        let report = simulate(&set, &t).unwrap();
        assert!(report.all_distinguished());
        assert!(report.all_deterministic());
        assert!(report.bookkeeping_ok());
        assert!(report.max_leaf_candidates() <= 2);
        // xi5 exits after Alice P1 then Bob P1
        let xi5 = &report.states["xi5"];
        assert_eq!(xi5.paths.len(), 1);
        assert_eq!(xi5.paths[0].outcomes[..2], ["P1", "P1"]);
    }

    #[test]
    fn g3_branch_candidates() {
        let t = build_g3_protocol();
        let ProtocolTree::Node(root) = &t else {
            panic!()
        };
        // Alice P1 keeps {xi1±, xi2±, xi5}
        let (_, p1) = root.children.iter().find(|(l, _)| l == "P1").unwrap();
        let mut ids = p1.leaf_union();
        ids.sort();
        assert_eq!(ids, vec!["xi1+", "xi1-", "xi2+", "xi2-", "xi5"]);
        // Alice P2 then Bob P4 keeps {xi6±, xi9±}
        let (_, p2) = root.children.iter().find(|(l, _)| l == "P2").unwrap();
        let ProtocolTree::Node(bob) = p2 else {
            panic!()
        };
        let (_, p4) = bob.children.iter().find(|(l, _)| l == "P4").unwrap();
        let mut ids = p4.leaf_union();
        ids.sort();
        assert_eq!(ids, vec!["xi6+", "xi6-", "xi9+", "xi9-"]);
        // and that sub-branch is resolved by Charlie's difference measurement
        let ProtocolTree::Node(charlie) = p4 else {
            panic!()
        };
        assert_eq!(charlie.party, 2);
        assert_eq!(charlie.measurement.name(), "M1^C");
    }

    #[test]
    fn leaf_unions_cover_the_sets() {
        for (set, tree) in [
            (build_g1(), build_g1_protocol()),
            (build_g2(), build_g2_protocol()),
            (build_g3(), build_g3_protocol()),
            (build_g4(), build_g4_protocol()),
        ] {
            let mut ids = tree.leaf_union();
            ids.sort();
            let mut expected = set.ids();
            expected.sort();
            assert_eq!(ids, expected);
        }
    }

    #[test]
    fn g4_simulation() {
        let set = build_g4();
        let t = build_g4_protocol();
        t.validate(set.spec()).unwrap();
        let report = simulate(&set, &t).unwrap();
        assert!(report.all_distinguished());
        assert!(report.all_deterministic());
        assert!(report.bookkeeping_ok());
        assert!(report.max_leaf_candidates() <= 2);
    }

    #[test]
    fn g4_branch_examples() {
        let t = build_g4_protocol();
        let ProtocolTree::Node(root) = &t else {
            panic!()
        };
        let (_, p1) = root.children.iter().find(|(l, _)| l == "P1").unwrap();
        let mut ids = p1.leaf_union();
        ids.sort();
        assert_eq!(ids, vec!["zeta5", "zeta6+", "zeta6-", "zeta7+", "zeta7-"]);
        // P1 then P1 identifies zeta5
        let ProtocolTree::Node(alice) = p1 else {
            panic!()
        };
        let (_, alice_p1) = alice.children.iter().find(|(l, _)| l == "P1").unwrap();
        assert_eq!(alice_p1.leaf_union(), vec!["zeta5"]);
        // P4 then T2 leaves the zeta3 pair
        let (_, p4) = root.children.iter().find(|(l, _)| l == "P4").unwrap();
        let ProtocolTree::Node(alice4) = p4 else {
            panic!()
        };
        let (_, t2) = alice4.children.iter().find(|(l, _)| l == "T2").unwrap();
        assert_eq!(t2.leaf_union(), vec!["zeta3+", "zeta3-"]);
    }

    #[test]
    fn single_state_bare_leaf() {
        let spec = crate::hilbert::PartySpec::new(&[2, 2]).unwrap();
        let set = StateSet::new(
            spec,
            vec![ProductState::new("only", vec![rvec(&[1, 0]), rvec(&[1, 1])]).unwrap()],
        )
        .unwrap();
        let t = ProtocolTree::leaf(vec!["only".into()]);
        let report = simulate(&set, &t).unwrap();
        assert!(report.all_distinguished());
    }

    #[test]
    fn malformed_trees_are_rejected() {
        let g1 = build_g1();
        // incomplete measurement
        let m = Measurement::local(
            "half",
            1,
            6,
            vec![("P".into(), span_of(&[&[1, 0, 0, 0, 0, 0]]))],
        )
        .unwrap();
        let t = ProtocolTree::node(1, m, vec![("P".into(), ProtocolTree::leaf(vec![]))]);
        assert!(matches!(simulate(&g1, &t), Err(Error::MalformedTree(_))));
        // children not covering the outcomes
        let t = ProtocolTree::node(
            1,
            n_b_measurement(),
            vec![("N1".into(), ProtocolTree::leaf(vec![]))],
        );
        assert!(matches!(simulate(&g1, &t), Err(Error::MalformedTree(_))));
        // wrong party
        let t = ProtocolTree::node(
            5,
            n_b_measurement(),
            vec![("N1".into(), ProtocolTree::leaf(vec![]))],
        );
        assert!(matches!(simulate(&g1, &t), Err(Error::MalformedTree(_))));
    }

    #[test]
    fn protocol_text_round_trip() {
        for (set, tree) in [
            (build_g1(), build_g1_protocol()),
            (build_g2(), build_g2_protocol()),
            (build_g3(), build_g3_protocol()),
            (build_g4(), build_g4_protocol()),
        ] {
            let text = write_protocol(&tree);
            let parsed = parse_protocol(&text).unwrap();
            parsed.validate(set.spec()).unwrap();
            // behaviorally identical: same simulation verdicts and leaves
            let a = simulate(&set, &tree).unwrap();
            let b = simulate(&set, &parsed).unwrap();
            assert_eq!(a.all_distinguished(), b.all_distinguished());
            let leaves_a: Vec<_> = a.leaves.keys().collect();
            let leaves_b: Vec<_> = b.leaves.keys().collect();
            assert_eq!(leaves_a, leaves_b);
        }
    }
}
