//! Opinion spaces: worlds, propositions, quotients and compactification.
//!
//! Two representations are supported. Explicit finite spaces list their worlds
//! (natural-number labels) and each proposition's member set. Symbolic spaces
//! over the naturals are one of three closed families, with proposition `i`
//! (numbered from 1) given by:
//!
//! | family              | proposition `i`                         |
//! |---------------------|-----------------------------------------|
//! | tail sets           | `{n : n >= i}`                          |
//! | initial segments    | `{n : n <= i}`                          |
//! | countable partition | `{i - 1}` (last cell `{n >= m-1}` when `m` cells) |
//!
//! A compactified symbolic space carries one extra world, the star point,
//! which lies in every tail set, and in no initial segment or partition cell.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{invalid_arg, CredalError, Result};

pub const DEFAULT_TRUNCATION: usize = 64;
pub const DEFAULT_COMPACTNESS_DEPTH: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(untagged)]
pub enum World {
    Nat(u64),
    Star(String),
}

impl fmt::Display for World {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            World::Nat(n) => write!(f, "{n}"),
            World::Star(s) => f.write_str(s),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceKind {
    ExplicitFinite,
    TailSets,
    InitialSegments,
    CountablePartition,
}

impl SpaceKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SpaceKind::ExplicitFinite => "explicit",
            SpaceKind::TailSets => "tails",
            SpaceKind::InitialSegments => "initial_segments",
            SpaceKind::CountablePartition => "partition",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    TailSets,
    InitialSegments,
    /// `cells: None` is the partition of the naturals into singletons.
    CountablePartition { cells: Option<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitSpace {
    worlds: Vec<u64>,
    props: Vec<BTreeSet<u64>>,
}

impl ExplicitSpace {
    pub fn worlds(&self) -> &[u64] {
        &self.worlds
    }

    pub fn propositions(&self) -> &[BTreeSet<u64>] {
        &self.props
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Repr {
    Explicit(ExplicitSpace),
    Symbolic { family: Family, star: Option<String> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpinionSpace {
    repr: Repr,
    truncation_default: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Descriptor {
    Members { worlds: Vec<u64> },
    Tail { from: u64 },
    InitialSegment { upto: u64 },
    Cell { world: u64 },
    LastCell { from: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Proposition {
    pub id: usize,
    pub descriptor: Descriptor,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WorldAtom {
    pub id: usize,
    pub signature: Vec<bool>,
    pub representative: Option<World>,
}

/// Rows are atoms, columns are propositions; entry `(w, i)` is `v_w(p_i)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValuationMatrix {
    rows: Vec<Vec<bool>>,
    n_props: usize,
}

impl ValuationMatrix {
    pub fn new(rows: Vec<Vec<bool>>, n_props: usize) -> Result<Self> {
        if rows.iter().any(|r| r.len() != n_props) {
            return invalid_arg("valuation rows must all have one entry per proposition");
        }
        let distinct: BTreeSet<&Vec<bool>> = rows.iter().collect();
        if distinct.len() != rows.len() {
            return invalid_arg("valuation rows must be pairwise distinct");
        }
        Ok(ValuationMatrix { rows, n_props })
    }

    pub fn n_atoms(&self) -> usize {
        self.rows.len()
    }

    pub fn n_props(&self) -> usize {
        self.n_props
    }

    pub fn row(&self, atom: usize) -> &[bool] {
        &self.rows[atom]
    }

    pub fn rows(&self) -> &[Vec<bool>] {
        &self.rows
    }

    pub fn entry(&self, atom: usize, prop: usize) -> bool {
        self.rows[atom][prop]
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct StructureFlags {
    pub point_finite: bool,
    pub countably_discriminating: bool,
    pub is_partition: bool,
    pub nested_increasing: bool,
    pub nested_decreasing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CompactnessVerdict {
    CompactCertified,
    NonCompactWitness,
    UnknownUpToDepth,
}

/// A signed sequence `p_n^{f(n)}` with `p_n` the `n`-th proposition and `f`
/// constant, together with checkable evidence that it is finitely satisfiable
/// but has empty intersection.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NonCompactWitness {
    /// `true` when every term is a complement (`f(n) = 1`).
    pub negated: bool,
    /// `(N, least world in the intersection of the first N terms)`.
    pub prefix_members: Vec<(usize, u64)>,
    /// `(world, index of a term that excludes it)`.
    pub exclusions: Vec<(u64, usize)>,
    /// Closed form of the excluding index, valid for every world.
    pub exclusion_rule: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompactnessReport {
    pub verdict: CompactnessVerdict,
    pub witness: Option<NonCompactWitness>,
    pub certificate: Option<String>,
    pub depth_searched: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AddedPoint {
    pub label: String,
    pub defining_sequence: String,
    /// Membership of the point in every `p*` (the same for all propositions
    /// in the supported families).
    pub in_every_proposition: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Compactification {
    pub base: OpinionSpace,
    pub space: OpinionSpace,
    pub added_points: Vec<AddedPoint>,
}

impl Compactification {
    /// The index-preserving bijection `p -> p*`.
    pub fn psi(&self, prop_id: usize) -> usize {
        prop_id
    }

    /// Membership of added point `k` in `p*` for proposition `prop_id`.
    pub fn star_signature(&self, point: usize, prop_id: usize) -> Option<bool> {
        let p = self.added_points.get(point)?;
        if self.base.prop_count().is_some_and(|n| prop_id > n) || prop_id == 0 {
            return None;
        }
        Some(p.in_every_proposition)
    }
}

fn star_label(canonical: &str) -> String {
    let digest = Sha256::digest(canonical.as_bytes());
    format!("star:{}", &hex::encode(digest)[..16])
}

impl OpinionSpace {
    pub fn explicit(worlds: Vec<u64>, props: Vec<Vec<u64>>) -> Result<Self> {
        let world_set: BTreeSet<u64> = worlds.iter().copied().collect();
        if world_set.is_empty() {
            return invalid_arg("an explicit space needs at least one world");
        }
        if world_set.len() != worlds.len() {
            return invalid_arg("world labels must be distinct");
        }
        if props.is_empty() {
            return invalid_arg("an explicit space needs at least one proposition");
        }
        let mut out = Vec::with_capacity(props.len());
        for (i, p) in props.into_iter().enumerate() {
            let set: BTreeSet<u64> = p.into_iter().collect();
            if let Some(w) = set.iter().find(|w| !world_set.contains(w)) {
                return invalid_arg(format!("proposition {} mentions unknown world {w}", i + 1));
            }
            out.push(set);
        }
        Ok(OpinionSpace {
            repr: Repr::Explicit(ExplicitSpace { worlds: world_set.into_iter().collect(), props: out }),
            truncation_default: DEFAULT_TRUNCATION,
        })
    }

    pub fn symbolic(family: Family) -> Result<Self> {
        if let Family::CountablePartition { cells: Some(0) } = family {
            return invalid_arg("a partition needs at least one cell");
        }
        Ok(OpinionSpace { repr: Repr::Symbolic { family, star: None }, truncation_default: DEFAULT_TRUNCATION })
    }

    pub fn tail_sets() -> Self {
        Self::symbolic(Family::TailSets).expect("valid family")
    }

    pub fn initial_segments() -> Self {
        Self::symbolic(Family::InitialSegments).expect("valid family")
    }

    pub fn countable_partition() -> Self {
        Self::symbolic(Family::CountablePartition { cells: None }).expect("valid family")
    }

    pub fn with_truncation(mut self, k: usize) -> Result<Self> {
        if k < 1 {
            return invalid_arg("truncation must be at least 1");
        }
        self.truncation_default = k;
        Ok(self)
    }

    pub fn truncation_default(&self) -> usize {
        self.truncation_default
    }

    pub fn kind(&self) -> SpaceKind {
        match &self.repr {
            Repr::Explicit(_) => SpaceKind::ExplicitFinite,
            Repr::Symbolic { family: Family::TailSets, .. } => SpaceKind::TailSets,
            Repr::Symbolic { family: Family::InitialSegments, .. } => SpaceKind::InitialSegments,
            Repr::Symbolic { family: Family::CountablePartition { .. }, .. } => SpaceKind::CountablePartition,
        }
    }

    pub fn family(&self) -> Option<Family> {
        match &self.repr {
            Repr::Symbolic { family, .. } => Some(*family),
            Repr::Explicit(_) => None,
        }
    }

    pub fn as_explicit(&self) -> Option<&ExplicitSpace> {
        match &self.repr {
            Repr::Explicit(e) => Some(e),
            Repr::Symbolic { .. } => None,
        }
    }

    pub fn is_symbolic(&self) -> bool {
        matches!(self.repr, Repr::Symbolic { .. })
    }

    /// Label of the added compactification point, if this space has one.
    pub fn star(&self) -> Option<&str> {
        match &self.repr {
            Repr::Symbolic { star, .. } => star.as_deref(),
            Repr::Explicit(_) => None,
        }
    }

    /// Number of propositions, `None` when countably infinite.
    pub fn prop_count(&self) -> Option<usize> {
        match &self.repr {
            Repr::Explicit(e) => Some(e.props.len()),
            Repr::Symbolic { family: Family::CountablePartition { cells }, .. } => *cells,
            Repr::Symbolic { .. } => None,
        }
    }

    /// Number of propositions considered at truncation `k`.
    pub fn truncated_prop_count(&self, k: usize) -> usize {
        match &self.repr {
            Repr::Explicit(e) => e.props.len(),
            _ => self.prop_count().map_or(k, |n| n.min(k)),
        }
    }

    /// Membership of `world` in proposition `id` (numbered from 1).
    pub fn contains(&self, id: usize, world: &World) -> bool {
        if id == 0 {
            return false;
        }
        match (&self.repr, world) {
            (Repr::Explicit(e), World::Nat(w)) => e.props.get(id - 1).is_some_and(|p| p.contains(w)),
            (Repr::Explicit(_), World::Star(_)) => false,
            (Repr::Symbolic { family, star }, World::Star(label)) => {
                star.as_deref() == Some(label.as_str()) && *family == Family::TailSets
            }
            (Repr::Symbolic { family, .. }, World::Nat(n)) => {
                let (n, i) = (*n, id as u64);
                match family {
                    Family::TailSets => n >= i,
                    Family::InitialSegments => n <= i,
                    Family::CountablePartition { cells: None } => n == i - 1,
                    Family::CountablePartition { cells: Some(m) } => {
                        let m = *m as u64;
                        if i < m {
                            n == i - 1
                        } else if i == m {
                            n >= m - 1
                        } else {
                            false
                        }
                    }
                }
            }
        }
    }

    pub fn propositions(&self, k: usize) -> Vec<Proposition> {
        let n = self.truncated_prop_count(k);
        (1..=n)
            .map(|id| {
                let descriptor = match &self.repr {
                    Repr::Explicit(e) => Descriptor::Members { worlds: e.props[id - 1].iter().copied().collect() },
                    Repr::Symbolic { family, .. } => match family {
                        Family::TailSets => Descriptor::Tail { from: id as u64 },
                        Family::InitialSegments => Descriptor::InitialSegment { upto: id as u64 },
                        Family::CountablePartition { cells: Some(m) } if id == *m => {
                            Descriptor::LastCell { from: id as u64 - 1 }
                        }
                        Family::CountablePartition { .. } => Descriptor::Cell { world: id as u64 - 1 },
                    },
                };
                Proposition { id, descriptor }
            })
            .collect()
    }

    /// Worlds whose signatures cover every atom at truncation `k`.
    fn candidate_worlds(&self, k: usize) -> Vec<World> {
        let mut out: Vec<World> = match &self.repr {
            Repr::Explicit(e) => e.worlds.iter().map(|w| World::Nat(*w)).collect(),
            Repr::Symbolic { family, .. } => {
                let n = self.truncated_prop_count(k) as u64;
                let last = match family {
                    Family::InitialSegments => n + 1,
                    _ => n,
                };
                (0..=last).map(World::Nat).collect()
            }
        };
        if let Some(s) = self.star() {
            out.push(World::Star(s.to_string()));
        }
        out
    }

    /// One atom per distinct signature over the (truncated) proposition list.
    /// Representatives are the least natural number in each class; the star
    /// point only represents a class no natural number reaches.
    pub fn build_quotient(&self, k: usize) -> Result<(Vec<WorldAtom>, ValuationMatrix)> {
        if k < 1 {
            return invalid_arg("truncation must be at least 1");
        }
        let n = self.truncated_prop_count(k);
        let mut seen: BTreeMap<Vec<bool>, usize> = BTreeMap::new();
        let mut atoms = Vec::new();
        for w in self.candidate_worlds(k) {
            let sig: Vec<bool> = (1..=n).map(|id| self.contains(id, &w)).collect();
            if seen.contains_key(&sig) {
                continue;
            }
            seen.insert(sig.clone(), atoms.len());
            atoms.push(WorldAtom { id: atoms.len(), signature: sig, representative: Some(w) });
        }
        let matrix = ValuationMatrix::new(atoms.iter().map(|a| a.signature.clone()).collect(), n)?;
        Ok((atoms, matrix))
    }

    pub fn analyze_structure(&self) -> StructureFlags {
        match &self.repr {
            Repr::Explicit(e) => {
                let mut pairwise_disjoint = true;
                for (i, p) in e.props.iter().enumerate() {
                    for q in &e.props[i + 1..] {
                        if !p.is_disjoint(q) {
                            pairwise_disjoint = false;
                        }
                    }
                }
                let union: BTreeSet<u64> = e.props.iter().flatten().copied().collect();
                let covers = union.len() == e.worlds.len();
                StructureFlags {
                    point_finite: true,
                    countably_discriminating: true,
                    is_partition: pairwise_disjoint && covers,
                    nested_increasing: e.props.windows(2).all(|w| w[0].is_subset(&w[1])),
                    nested_decreasing: e.props.windows(2).all(|w| w[0].is_superset(&w[1])),
                }
            }
            Repr::Symbolic { family, star } => match family {
                // world n lies in p_1..p_n only; the star point lies in all of them
                Family::TailSets => StructureFlags {
                    point_finite: star.is_none(),
                    countably_discriminating: true,
                    is_partition: false,
                    nested_increasing: false,
                    nested_decreasing: true,
                },
                Family::InitialSegments => StructureFlags {
                    point_finite: false,
                    countably_discriminating: true,
                    is_partition: false,
                    nested_increasing: true,
                    nested_decreasing: false,
                },
                Family::CountablePartition { cells } => StructureFlags {
                    point_finite: true,
                    countably_discriminating: true,
                    is_partition: star.is_none(),
                    nested_increasing: *cells == Some(1),
                    nested_decreasing: *cells == Some(1),
                },
            },
        }
    }

    /// Whether the space is compact in the finite-intersection sense, with an
    /// analytic witness or certificate for each supported family.
    pub fn search_compactness_witness(&self, depth: usize) -> Result<CompactnessReport> {
        if depth < 1 {
            return invalid_arg("depth must be at least 1");
        }
        let certified = |why: &str| CompactnessReport {
            verdict: CompactnessVerdict::CompactCertified,
            witness: None,
            certificate: Some(why.to_string()),
            depth_searched: depth,
        };
        let (family, star) = match &self.repr {
            Repr::Explicit(_) => return Ok(certified("finitely many worlds: finite intersections stabilize")),
            Repr::Symbolic { family, star } => (*family, star),
        };
        if star.is_some() {
            return Ok(certified(
                "the added point lies in the intersection of every finitely satisfiable signed sequence with empty intersection over the naturals",
            ));
        }
        let (negated, rule) = match family {
            Family::TailSets => (false, "world n is excluded by term n+1"),
            Family::InitialSegments => (true, "world n is excluded by term max(n,1)"),
            Family::CountablePartition { cells: None } => (true, "world n is excluded by term n+1"),
            Family::CountablePartition { cells: Some(_) } => {
                return Ok(certified("finitely many cells: the quotient is finite"));
            }
        };
        let witness = self.signed_sequence_evidence(negated, depth, rule);
        Ok(CompactnessReport {
            verdict: CompactnessVerdict::NonCompactWitness,
            witness: Some(witness),
            certificate: None,
            depth_searched: depth,
        })
    }

    fn signed_member(&self, id: usize, negated: bool, w: &World) -> bool {
        self.contains(id, w) != negated
    }

    fn signed_sequence_evidence(&self, negated: bool, depth: usize, rule: &str) -> NonCompactWitness {
        let mut prefix_members = Vec::new();
        for n in 1..=depth {
            let least = (0..=(n as u64 + 2))
                .find(|w| (1..=n).all(|id| self.signed_member(id, negated, &World::Nat(*w))));
            if let Some(w) = least {
                prefix_members.push((n, w));
            }
        }
        let mut exclusions = Vec::new();
        for w in 0..depth as u64 {
            let idx = (1..=(w as usize + 2)).find(|id| !self.signed_member(*id, negated, &World::Nat(w)));
            if let Some(i) = idx {
                exclusions.push((w, i));
            }
        }
        NonCompactWitness { negated, prefix_members, exclusions, exclusion_rule: rule.to_string() }
    }

    /// Re-checks a witness against this space up to its recorded depth: every
    /// prefix intersection is nonempty and every checked world (and the star
    /// point, if any) is excluded by some term.
    pub fn verify_witness(&self, witness: &NonCompactWitness, depth: usize) -> bool {
        let prefixes_ok = (1..=depth).all(|n| {
            witness.prefix_members.iter().any(|(m, w)| {
                *m == n && (1..=n).all(|id| self.signed_member(id, witness.negated, &World::Nat(*w)))
            })
        });
        let exclusions_ok = (0..depth as u64).all(|w| {
            witness
                .exclusions
                .iter()
                .any(|(x, id)| *x == w && !self.signed_member(*id, witness.negated, &World::Nat(w)))
        });
        let star_excluded = match self.star() {
            None => true,
            Some(s) => {
                let star = World::Star(s.to_string());
                (1..=depth).any(|id| !self.signed_member(id, witness.negated, &star))
            }
        };
        prefixes_ok && exclusions_ok && star_excluded
    }

    pub fn compactify(&self) -> Result<Compactification> {
        let unchanged = || Compactification { base: self.clone(), space: self.clone(), added_points: Vec::new() };
        let family = match &self.repr {
            Repr::Explicit(_) => return Ok(unchanged()),
            Repr::Symbolic { star: Some(_), .. } => return Ok(unchanged()),
            Repr::Symbolic { family, star: None } => *family,
        };
        let (canonical, in_all) = match family {
            Family::TailSets => ("tails;f=0;p_n={m>=n}", true),
            Family::InitialSegments => ("initial_segments;f=1;p_n={m<=n}", false),
            Family::CountablePartition { cells: None } => ("partition;f=1;p_n={n-1}", false),
            Family::CountablePartition { cells: Some(_) } => return Ok(unchanged()),
        };
        let label = star_label(canonical);
        let space = OpinionSpace {
            repr: Repr::Symbolic { family, star: Some(label.clone()) },
            truncation_default: self.truncation_default,
        };
        Ok(Compactification {
            base: self.clone(),
            space,
            added_points: vec![AddedPoint {
                label,
                defining_sequence: canonical.to_string(),
                in_every_proposition: in_all,
            }],
        })
    }
}

impl From<CompactnessVerdict> for &'static str {
    fn from(v: CompactnessVerdict) -> Self {
        match v {
            CompactnessVerdict::CompactCertified => "compact_certified",
            CompactnessVerdict::NonCompactWitness => "non_compact_witness",
            CompactnessVerdict::UnknownUpToDepth => "unknown_up_to_depth",
        }
    }
}

pub(crate) fn require_explicit(space: &OpinionSpace) -> Result<&ExplicitSpace> {
    space
        .as_explicit()
        .ok_or_else(|| CredalError::InvalidArgument("operation requires an explicit finite space".into()))
}
