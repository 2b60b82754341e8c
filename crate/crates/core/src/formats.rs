//! JSON file schemas and report layouts. All city indices and positions are 1-based.

use std::collections::BTreeMap;
use std::fmt::Display;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use serde::{Deserialize, Serialize};

use crate::clue::{ClueString, PartialClue};
use crate::entropy::PosteriorTable;
use crate::error::{Error, Result};
use crate::game::{Complexity, GameOutcome, GameValue};
use crate::hypercube::{DegreeReport, KHalvingStrategy, KSet, MinMaxDegree, Theorem1Report};
use crate::query::{DecisionTree, Node, RandomizedAlgorithm, Theorem2Report};
use crate::strategy::{BobStrategy, MemorylessStrategy, TableStrategy};

/// Writes an exact probability as `num/den`, keeping the denominator even when it is 1.
pub fn fraction<T: Display + Clone + Integer>(r: &Ratio<T>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_fraction(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidAlgorithm(format!("bad probability {s:?}; expected \"num/den\""));
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s.trim(), "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den == BigInt::from(0) {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

fn bit_of(v: u8, what: &str) -> Result<bool> {
    match v {
        0 => Ok(false),
        1 => Ok(true),
        _ => Err(Error::InvalidStrategy(format!("{what} must be 0 or 1, got {v}"))),
    }
}

fn zero_based(cities: &[usize], err: impl Fn(String) -> Error) -> Result<Vec<usize>> {
    cities.iter().map(|&c| c.checked_sub(1).ok_or_else(|| err("city index 0 (indices are 1-based)".into()))).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryFile {
    pub prefix: Vec<usize>,
    pub bit: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableFile {
    pub t: usize,
    pub entries: Vec<EntryFile>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleFile {
    /// Clues already placed, e.g. `"0*1"`.
    pub state: String,
    pub city: usize,
    pub bit: u8,
}

/// Strategy file. `kind` is `"table"`, `"k_halving"` or `"memoryless"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyFile {
    pub n: usize,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tables: Option<Vec<TableFile>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_hex: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rules: Option<Vec<RuleFile>>,
}

impl StrategyFile {
    pub fn from_table(table: &TableStrategy) -> Self {
        let n = table.n();
        let mut tables: Vec<TableFile> = (1..n).map(|t| TableFile { t, entries: Vec::new() }).collect();
        for (prefix, bit) in table.entries() {
            tables[prefix.len() - 1]
                .entries
                .push(EntryFile { prefix: prefix.iter().map(|&c| c as usize + 1).collect(), bit: bit as u8 });
        }
        StrategyFile { n, kind: "table".into(), tables: Some(tables), k_hex: None, rules: None }
    }

    pub fn from_memoryless(m: &MemorylessStrategy) -> Self {
        let rules = m
            .rules()
            .map(|(w, city, bit)| RuleFile { state: w.to_string(), city: city + 1, bit: bit as u8 })
            .collect();
        StrategyFile { n: m.n(), kind: "memoryless".into(), tables: None, k_hex: None, rules: Some(rules) }
    }

    pub fn from_strategy(s: &BobStrategy) -> Self {
        match s {
            BobStrategy::Table(t) => Self::from_table(t),
            BobStrategy::KHalving(k) => StrategyFile {
                n: k.n(),
                kind: "k_halving".into(),
                tables: None,
                k_hex: Some(k.kset().to_hex()),
                rules: None,
            },
        }
    }

    pub fn to_strategy(&self) -> Result<BobStrategy> {
        match self.kind.as_str() {
            "table" => {
                let tables = self.tables.as_ref().ok_or_else(|| Error::InvalidStrategy("missing \"tables\"".into()))?;
                let mut entries = Vec::new();
                for table in tables {
                    for e in &table.entries {
                        if e.prefix.len() != table.t {
                            return Err(Error::InvalidStrategy(format!(
                                "prefix {:?} listed under t = {}",
                                e.prefix, table.t
                            )));
                        }
                        entries.push((zero_based(&e.prefix, Error::InvalidStrategy)?, bit_of(e.bit, "bit")?));
                    }
                }
                Ok(TableStrategy::from_entries(self.n, entries)?.into())
            }
            "k_halving" => {
                let hex = self.k_hex.as_ref().ok_or_else(|| Error::InvalidStrategy("missing \"k_hex\"".into()))?;
                Ok(KHalvingStrategy::new(KSet::from_hex(self.n, hex)?)?.into())
            }
            "memoryless" => {
                let rules = self.rules.as_ref().ok_or_else(|| Error::InvalidStrategy("missing \"rules\"".into()))?;
                let mut m = MemorylessStrategy::new(self.n)?;
                for r in rules {
                    let w: PartialClue = r.state.parse()?;
                    let city = r.city.checked_sub(1).ok_or_else(|| Error::InvalidStrategy("city index 0".into()))?;
                    m.insert(w, city, bit_of(r.bit, "bit")?)?;
                }
                Ok(m.to_table()?.into())
            }
            other => Err(Error::InvalidStrategy(format!("unknown strategy kind {other:?}"))),
        }
    }
}

/// Short description of a strategy embedded in reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyDescriptor {
    pub kind: String,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_hex: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entries: Option<usize>,
}

impl StrategyDescriptor {
    pub fn of(s: &BobStrategy) -> Self {
        match s {
            BobStrategy::Table(t) => StrategyDescriptor {
                kind: "table".into(),
                n: t.n(),
                k_hex: None,
                entries: Some(TableStrategy::entry_count(t.n())),
            },
            BobStrategy::KHalving(k) => StrategyDescriptor {
                kind: "k_halving".into(),
                n: k.n(),
                k_hex: Some(k.kset().to_hex()),
                entries: None,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KSetFile {
    pub n: usize,
    pub k_hex: String,
}

impl KSetFile {
    pub fn of(k: &KSet) -> Self {
        KSetFile { n: k.n(), k_hex: k.to_hex() }
    }

    pub fn to_kset(&self) -> Result<KSet> {
        KSet::from_hex(self.n, &self.k_hex)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NodeFile {
    Query { query: usize, if0: Box<NodeFile>, if1: Box<NodeFile> },
    Leaf { leaf: u8 },
}

impl NodeFile {
    fn of(node: &Node) -> Self {
        match node {
            Node::Leaf(b) => NodeFile::Leaf { leaf: *b as u8 },
            Node::Query { index, if0, if1 } => NodeFile::Query {
                query: index + 1,
                if0: Box::new(NodeFile::of(if0)),
                if1: Box::new(NodeFile::of(if1)),
            },
        }
    }

    fn to_node(&self) -> Result<Node> {
        match self {
            NodeFile::Leaf { leaf } => match leaf {
                0 | 1 => Ok(Node::Leaf(*leaf == 1)),
                v => Err(Error::InvalidTree(format!("leaf must be 0 or 1, got {v}"))),
            },
            NodeFile::Query { query, if0, if1 } => {
                let index = query.checked_sub(1).ok_or_else(|| Error::InvalidTree("query index 0".into()))?;
                Ok(Node::query(index, if0.to_node()?, if1.to_node()?))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeFile {
    pub n: usize,
    pub t: usize,
    pub root: NodeFile,
}

impl TreeFile {
    pub fn of(tree: &DecisionTree) -> Self {
        TreeFile { n: tree.n(), t: tree.t(), root: NodeFile::of(tree.root()) }
    }

    pub fn to_tree(&self) -> Result<DecisionTree> {
        DecisionTree::new(self.n, self.t, self.root.to_node()?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtomFile {
    pub p: String,
    pub tree: TreeFile,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgorithmFile {
    pub atoms: Vec<AtomFile>,
}

/// An algorithm file, or a single tree file read as a deterministic algorithm.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlgorithmInput {
    Mixture(AlgorithmFile),
    Tree(TreeFile),
}

impl AlgorithmInput {
    pub fn to_algorithm(&self) -> Result<RandomizedAlgorithm> {
        match self {
            AlgorithmInput::Tree(t) => Ok(RandomizedAlgorithm::deterministic(t.to_tree()?)),
            AlgorithmInput::Mixture(m) => RandomizedAlgorithm::new(
                m.atoms.iter().map(|a| Ok((a.tree.to_tree()?, parse_fraction(&a.p)?))).collect::<Result<_>>()?,
            ),
        }
    }
}

impl AlgorithmFile {
    pub fn of(alg: &RandomizedAlgorithm) -> Self {
        AlgorithmFile {
            atoms: alg.atoms().iter().map(|(t, p)| AtomFile { p: fraction(p), tree: TreeFile::of(t) }).collect(),
        }
    }
}

fn one_based(set: impl IntoIterator<Item = usize>) -> Vec<usize> {
    set.into_iter().map(|c| c + 1).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameOutcomeJson {
    pub pi: Vec<usize>,
    pub z: u8,
    pub b: String,
    pub suspects: Vec<usize>,
    pub cost: usize,
}

impl From<&GameOutcome> for GameOutcomeJson {
    fn from(o: &GameOutcome) -> Self {
        GameOutcomeJson {
            pi: o.pi.to_one_based(),
            z: o.z as u8,
            b: o.b.to_string(),
            suspects: one_based(o.suspects.iter().copied()),
            cost: o.cost,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexityJson {
    pub n: usize,
    pub strategy: StrategyDescriptor,
    pub complexity: usize,
    pub witness_pi: Vec<usize>,
    pub witness_z: u8,
}

impl ComplexityJson {
    pub fn new(strategy: &BobStrategy, c: &Complexity) -> Self {
        ComplexityJson {
            n: strategy.n(),
            strategy: StrategyDescriptor::of(strategy),
            complexity: c.value,
            witness_pi: c.witness_pi.to_one_based(),
            witness_z: c.witness_z as u8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameValueJson {
    pub n: usize,
    pub complexity: usize,
    pub strategies_examined: u64,
    pub witness_index: u64,
    pub witness: StrategyFile,
}

impl From<&GameValue> for GameValueJson {
    fn from(v: &GameValue) -> Self {
        GameValueJson {
            n: v.n,
            complexity: v.value,
            strategies_examined: v.strategies_examined,
            witness_index: v.strategy_index,
            witness: StrategyFile::from_table(&v.strategy),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeJson {
    pub n: usize,
    pub size: usize,
    pub max_degree: usize,
    pub witness: String,
    pub histogram: BTreeMap<usize, usize>,
}

impl From<&DegreeReport> for DegreeJson {
    fn from(r: &DegreeReport) -> Self {
        DegreeJson {
            n: r.n,
            size: r.size,
            max_degree: r.max_degree,
            witness: r.witness.to_string(),
            histogram: r.histogram.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinMaxDegreeJson {
    pub n: usize,
    pub threshold: usize,
    pub min_max_degree: usize,
    /// False when the value is only an upper bound from sampling.
    pub exact: bool,
    pub examined: u64,
    pub witness: KSetFile,
}

impl From<&MinMaxDegree> for MinMaxDegreeJson {
    fn from(r: &MinMaxDegree) -> Self {
        MinMaxDegreeJson {
            n: r.n,
            threshold: r.threshold,
            min_max_degree: r.value,
            exact: r.exact,
            examined: r.examined,
            witness: KSetFile::of(&r.witness),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterexampleJson {
    pub check: String,
    pub pi: Vec<usize>,
    pub z: Option<u8>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Theorem1Json {
    pub n: usize,
    #[serde(rename = "K_size")]
    pub k_size: usize,
    pub max_degree: usize,
    pub complexity: usize,
    pub witness_pi: Vec<usize>,
    pub witness_z: u8,
    pub bound_ok: bool,
    pub halving_ok: bool,
    pub endgame_ok: bool,
    pub member_ok: bool,
    pub neighbor_ok: bool,
    pub passed: bool,
    pub counterexample: Option<CounterexampleJson>,
}

impl From<&Theorem1Report> for Theorem1Json {
    fn from(r: &Theorem1Report) -> Self {
        Theorem1Json {
            n: r.n,
            k_size: r.k_size,
            max_degree: r.max_degree,
            complexity: r.complexity.value,
            witness_pi: r.complexity.witness_pi.to_one_based(),
            witness_z: r.complexity.witness_z as u8,
            bound_ok: r.bound_ok,
            halving_ok: r.halving_ok,
            endgame_ok: r.endgame_ok,
            member_ok: r.member_ok,
            neighbor_ok: r.neighbor_ok,
            passed: r.passed(),
            counterexample: r.counterexample.as_ref().map(|c| CounterexampleJson {
                check: c.check.into(),
                pi: c.pi.to_one_based(),
                z: c.z.map(|z| z as u8),
                detail: c.detail.clone(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntropyRowJson {
    pub b: String,
    pub p: String,
    pub posterior: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyJson {
    pub n: usize,
    pub strategy: StrategyDescriptor,
    #[serde(rename = "H_bits")]
    pub h_bits: f64,
    pub rows: Vec<EntropyRowJson>,
}

impl EntropyJson {
    pub fn new(strategy: &BobStrategy, table: &PosteriorTable) -> Self {
        let width = table.n.to_string().len();
        EntropyJson {
            n: table.n,
            strategy: StrategyDescriptor::of(strategy),
            h_bits: table.conditional_entropy(),
            rows: table
                .rows
                .iter()
                .map(|(b, row)| EntropyRowJson {
                    b: b.to_string(),
                    p: fraction(&row.p),
                    // Zero-padded so that keys sort numerically.
                    posterior: row.posterior.iter().map(|(c, q)| (format!("{:0width$}", c + 1), fraction(q))).collect(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationJson {
    pub check: String,
    pub atom: usize,
    pub pi: Vec<usize>,
    pub z: u8,
    pub b: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HarnessJson {
    pub n: usize,
    pub t: usize,
    #[serde(rename = "K_size")]
    pub k_size: usize,
    pub premise: bool,
    pub search_success: Option<String>,
    pub parity_correct: Option<String>,
    pub eq1_ok: bool,
    pub eq2_ok: bool,
    pub view_ok: bool,
    pub support_ok: bool,
    pub bound_ok: bool,
    pub passed: bool,
    pub violation: Option<ViolationJson>,
}

impl From<&Theorem2Report> for HarnessJson {
    fn from(r: &Theorem2Report) -> Self {
        HarnessJson {
            n: r.n,
            t: r.t,
            k_size: r.k_size,
            premise: r.premise,
            search_success: r.search_success.as_ref().map(fraction),
            parity_correct: r.parity_correct.as_ref().map(fraction),
            eq1_ok: r.eq1_ok,
            eq2_ok: r.eq2_ok,
            view_ok: r.view_ok,
            support_ok: r.support_ok,
            bound_ok: r.bound_ok,
            passed: r.passed(),
            violation: r.violation.as_ref().map(|v| ViolationJson {
                check: v.check.into(),
                atom: v.atom + 1,
                pi: v.pi.to_one_based(),
                z: v.z as u8,
                b: v.b.to_string(),
            }),
        }
    }
}

/// Sampled or exact description of the law of `b` under the halving strategy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HardDistributionJson {
    pub n: usize,
    pub k_hex: String,
    pub exact: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distribution: Option<BTreeMap<String, String>>,
    pub support_ok: bool,
}

impl HardDistributionJson {
    pub fn sampled(k: &KSet, seed: u64, samples: &[ClueString]) -> Self {
        HardDistributionJson {
            n: k.n(),
            k_hex: k.to_hex(),
            exact: false,
            seed: Some(seed),
            support_ok: samples.iter().all(|b| k.contains_string(b)),
            samples: Some(samples.iter().map(|b| b.to_string()).collect()),
            distribution: None,
        }
    }

    pub fn exact(k: &KSet, dist: &BTreeMap<ClueString, Ratio<u64>>) -> Self {
        HardDistributionJson {
            n: k.n(),
            k_hex: k.to_hex(),
            exact: true,
            seed: None,
            support_ok: dist.keys().all(|b| k.contains_string(b)),
            samples: None,
            distribution: Some(dist.iter().map(|(b, p)| (b.to_string(), fraction(p))).collect()),
        }
    }
}
