//! JSON model and result documents.
//!
//! Floats are written with 17 significant digits in exponent form, which
//! round-trips every finite `f64` exactly.

use std::collections::HashMap;
use std::io;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::ser::{Formatter, PrettyFormatter};

use sepinfer::dbn::{next_name, next_var, CostReport, Initial, Verification};
use sepinfer::separability::{
    ConditionalDecomposition, DecompNode, TreeBranch, TreeNode, TreeRepresentation,
};
use sepinfer::{
    Assignment, Cpt, DbnModel, Error, Factor, MarginalSet, Result, SeparableDecomposition,
    Tolerances, TreeDecomposition, Variable, Witness,
};

struct SigFormatter(PrettyFormatter<'static>);

impl Formatter for SigFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(value))
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serializes with 17-significant-digit floats, newline-terminated.
pub fn to_json<S: Serialize>(value: &S) -> String {
    let mut buf = Vec::new();
    let mut ser =
        serde_json::Serializer::with_formatter(&mut buf, SigFormatter(PrettyFormatter::new()));
    value
        .serialize(&mut ser)
        .expect("documents contain only serializable data");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

fn parse<D: for<'de> Deserialize<'de>>(text: &str) -> Result<D> {
    serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))
}

fn doc_err(msg: impl Into<String>) -> Error {
    Error::Document(msg.into())
}

fn tol() -> Tolerances<f64> {
    Tolerances::default()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableDoc {
    pub name: String,
    pub cardinality: usize,
}

pub fn variable_docs(vars: &[Variable]) -> Vec<VariableDoc> {
    vars.iter()
        .map(|v| VariableDoc {
            name: v.name().to_string(),
            cardinality: v.cardinality(),
        })
        .collect()
}

pub fn names(vars: &[Variable]) -> Vec<String> {
    vars.iter().map(|v| v.name().to_string()).collect()
}

/// Declared variables, resolving next-slice names of declared ones too.
#[derive(Clone, Debug)]
pub struct Catalog {
    vars: Vec<Variable>,
    index: HashMap<String, usize>,
}

impl Catalog {
    pub fn new(docs: &[VariableDoc]) -> Result<Self> {
        let mut vars = Vec::with_capacity(docs.len());
        let mut index = HashMap::new();
        for d in docs {
            let v = Variable::new(&d.name, d.cardinality)?;
            if index.insert(d.name.clone(), vars.len()).is_some() {
                return Err(Error::DuplicateVariable(d.name.clone()));
            }
            vars.push(v);
        }
        Ok(Catalog { vars, index })
    }

    pub fn variables(&self) -> &[Variable] {
        &self.vars
    }

    pub fn get(&self, name: &str) -> Result<Variable> {
        if let Some(&i) = self.index.get(name) {
            return Ok(self.vars[i].clone());
        }
        match name.strip_suffix('\'') {
            Some(base) if self.index.contains_key(base) => Ok(next_var(&self.get(base)?)),
            _ => Err(doc_err(format!("undeclared variable `{name}`"))),
        }
    }

    pub fn all(&self, names: &[String]) -> Result<Vec<Variable>> {
        names.iter().map(|n| self.get(n)).collect()
    }

    pub fn assignment(&self, pairs: &[(String, usize)]) -> Result<Assignment> {
        Assignment::new(
            pairs
                .iter()
                .map(|(n, x)| Ok((self.get(n)?, *x)))
                .collect::<Result<_>>()?,
        )
    }
}

fn one_or_many_ser<S: Serializer>(v: &[String], s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        [one] => one.serialize(s),
        many => many.serialize(s),
    }
}

fn one_or_many_de<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<String>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        One(String),
        Many(Vec<String>),
    }
    Ok(match OneOrMany::deserialize(d)? {
        OneOrMany::One(s) => vec![s],
        OneOrMany::Many(v) => v,
    })
}

/// Conditional table: parents' assignments outermost, then children.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CptDoc {
    #[serde(
        serialize_with = "one_or_many_ser",
        deserialize_with = "one_or_many_de"
    )]
    pub child: Vec<String>,
    pub parents: Vec<String>,
    pub table: Vec<f64>,
}

impl CptDoc {
    pub fn from_cpt(cpt: &Cpt) -> Self {
        CptDoc {
            child: names(cpt.children()),
            parents: names(cpt.parents()),
            table: cpt.table().values().to_vec(),
        }
    }

    pub fn to_cpt(&self, catalog: &Catalog) -> Result<Cpt> {
        if self.child.is_empty() {
            return Err(doc_err("conditional without a child"));
        }
        let cpt = Cpt::joint(
            catalog.all(&self.child)?,
            catalog.all(&self.parents)?,
            self.table.clone(),
        )?;
        cpt.validate(&tol())?;
        Ok(cpt)
    }
}

/// Nonnegative table over `vars` in index order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableDoc {
    pub vars: Vec<String>,
    pub table: Vec<f64>,
}

impl TableDoc {
    pub fn from_factor(f: &Factor) -> Self {
        TableDoc {
            vars: names(f.scope()),
            table: f.values().to_vec(),
        }
    }

    pub fn to_factor(&self, catalog: &Catalog) -> Result<Factor> {
        Factor::new(catalog.all(&self.vars)?, self.table.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum InitialDoc {
    /// Joint over the state in declared order.
    Joint(Vec<f64>),
    Marginals(Vec<TableDoc>),
}

/// Tree node: `{"leaf": [...]}` or `{"vars": [...], "children": [...]}`
/// where `vars` lists the variables located at that node.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TreeDoc {
    Leaf {
        leaf: Vec<String>,
    },
    Node {
        vars: Vec<String>,
        children: Vec<TreeDoc>,
    },
}

impl TreeDoc {
    pub fn from_tree(tree: &TreeRepresentation) -> Self {
        fn go(node: &TreeNode, exclude: &[Variable]) -> TreeDoc {
            match node {
                TreeNode::Leaf(s) => TreeDoc::Leaf { leaf: names(s) },
                TreeNode::Internal(children) => {
                    let here = node.located_here(exclude);
                    let mut below = exclude.to_vec();
                    below.extend(here.iter().cloned());
                    TreeDoc::Node {
                        vars: names(&here),
                        children: children.iter().map(|c| go(c, &below)).collect(),
                    }
                }
            }
        }
        go(tree.root(), &[])
    }

    pub fn to_tree(&self, catalog: &Catalog) -> Result<TreeRepresentation> {
        fn build(doc: &TreeDoc, catalog: &Catalog) -> Result<TreeNode> {
            Ok(match doc {
                TreeDoc::Leaf { leaf } => TreeNode::Leaf(catalog.all(leaf)?),
                TreeDoc::Node { children, .. } => TreeNode::Internal(
                    children
                        .iter()
                        .map(|c| build(c, catalog))
                        .collect::<Result<_>>()?,
                ),
            })
        }
        fn same_vars(a: &TreeDoc, b: &TreeDoc) -> bool {
            match (a, b) {
                (TreeDoc::Leaf { .. }, TreeDoc::Leaf { .. }) => true,
                (
                    TreeDoc::Node {
                        vars: va,
                        children: ca,
                    },
                    TreeDoc::Node {
                        vars: vb,
                        children: cb,
                    },
                ) => {
                    va.len() == vb.len()
                        && va.iter().all(|v| vb.contains(v))
                        && ca.iter().zip(cb).all(|(x, y)| same_vars(x, y))
                }
                _ => false,
            }
        }
        let tree = TreeRepresentation::new(build(self, catalog)?)?;
        if !same_vars(self, &TreeDoc::from_tree(&tree)) {
            return Err(doc_err("tree node `vars` disagree with variable locations"));
        }
        Ok(tree)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Network,
    Dbn,
}

/// A Bayesian network (`cpts`) or a dynamic model (`state`, `transitions`,
/// `initial`), optionally with a subsystem family and its tree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub kind: Kind,
    pub variables: Vec<VariableDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cpts: Vec<CptDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub state: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub transitions: Vec<CptDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tree: Option<TreeDoc>,
}

impl ModelDocument {
    /// Network document declaring variables in order of first appearance.
    pub fn network(cpts: &[Cpt]) -> Self {
        let mut vars: Vec<Variable> = Vec::new();
        for c in cpts {
            for v in c.parents().iter().chain(c.children()) {
                if !vars.iter().any(|u| u.name() == v.name()) {
                    vars.push(v.clone());
                }
            }
        }
        ModelDocument {
            kind: Kind::Network,
            variables: variable_docs(&vars),
            cpts: cpts.iter().map(CptDoc::from_cpt).collect(),
            state: Vec::new(),
            transitions: Vec::new(),
            initial: None,
            family: None,
            tree: None,
        }
    }

    pub fn dbn(
        model: &DbnModel,
        family: Option<&[Vec<Variable>]>,
        tree: Option<&TreeRepresentation>,
    ) -> Self {
        let initial = match model.initial() {
            Initial::Joint(j) => InitialDoc::Joint(
                j.reorder(model.state())
                    .expect("initial joint covers the state")
                    .into_values(),
            ),
            Initial::Marginals(m) => {
                InitialDoc::Marginals(m.marginals().iter().map(TableDoc::from_factor).collect())
            }
        };
        ModelDocument {
            kind: Kind::Dbn,
            variables: variable_docs(model.state()),
            cpts: Vec::new(),
            state: names(model.state()),
            transitions: model.transitions().iter().map(CptDoc::from_cpt).collect(),
            initial: Some(initial),
            family: family.map(|f| f.iter().map(|s| names(s)).collect()),
            tree: tree.map(TreeDoc::from_tree),
        }
    }

    pub fn catalog(&self) -> Result<Catalog> {
        Catalog::new(&self.variables)
    }

    /// Parses and validates.
    pub fn load(text: &str) -> Result<Self> {
        let doc: ModelDocument = parse(text)?;
        doc.validate()?;
        Ok(doc)
    }

    pub fn save(&self) -> String {
        to_json(self)
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            Kind::Network => {
                self.to_network()?;
            }
            Kind::Dbn => {
                self.to_dbn()?;
            }
        }
        self.family()?;
        self.tree()?;
        Ok(())
    }

    /// Conditionals of a network: one per declared variable, acyclic.
    pub fn to_network(&self) -> Result<Vec<Cpt>> {
        if self.kind != Kind::Network {
            return Err(doc_err("expected a network document"));
        }
        if !self.state.is_empty() || !self.transitions.is_empty() || self.initial.is_some() {
            return Err(doc_err(
                "network documents carry no state, transitions or initial",
            ));
        }
        let catalog = self.catalog()?;
        let cpts = self
            .cpts
            .iter()
            .map(|c| c.to_cpt(&catalog))
            .collect::<Result<Vec<_>>>()?;
        for v in catalog.variables() {
            let owners = cpts
                .iter()
                .filter(|c| c.children().iter().any(|u| u.name() == v.name()))
                .count();
            if owners != 1 {
                return Err(doc_err(format!(
                    "`{v}` has {owners} conditionals, expected 1"
                )));
            }
        }
        check_acyclic(&cpts)?;
        Ok(cpts)
    }

    pub fn to_dbn(&self) -> Result<DbnModel> {
        if self.kind != Kind::Dbn {
            return Err(doc_err("expected a dbn document"));
        }
        if !self.cpts.is_empty() {
            return Err(doc_err("dbn documents use `transitions`, not `cpts`"));
        }
        let catalog = self.catalog()?;
        let state = catalog.all(&self.state)?;
        if state.len() != catalog.variables().len() {
            return Err(doc_err("every declared variable must be a state variable"));
        }
        for c in &self.transitions {
            if c.child.len() != 1 || !c.child[0].ends_with('\'') {
                return Err(doc_err(format!(
                    "transition child must be a single next-slice name like `{}`",
                    next_name("X")
                )));
            }
        }
        let transitions = self
            .transitions
            .iter()
            .map(|c| c.to_cpt(&catalog))
            .collect::<Result<Vec<_>>>()?;
        let initial = match &self.initial {
            None => return Err(doc_err("dbn document without `initial`")),
            Some(InitialDoc::Joint(values)) => {
                Initial::Joint(Factor::new(state.clone(), values.clone())?)
            }
            Some(InitialDoc::Marginals(parts)) => Initial::Marginals(MarginalSet::new(
                parts
                    .iter()
                    .map(|p| p.to_factor(&catalog))
                    .collect::<Result<_>>()?,
                &tol(),
            )?),
        };
        DbnModel::from_unordered(state, transitions, initial, &tol())
    }

    pub fn family(&self) -> Result<Option<Vec<Vec<Variable>>>> {
        let catalog = self.catalog()?;
        self.family
            .as_ref()
            .map(|f| f.iter().map(|s| catalog.all(s)).collect())
            .transpose()
    }

    pub fn tree(&self) -> Result<Option<TreeRepresentation>> {
        let catalog = self.catalog()?;
        self.tree.as_ref().map(|t| t.to_tree(&catalog)).transpose()
    }
}

fn check_acyclic(cpts: &[Cpt]) -> Result<()> {
    // Repeatedly peel nodes whose parents are all placed.
    let mut placed: Vec<&str> = Vec::new();
    let mut remaining: Vec<&Cpt> = cpts.iter().collect();
    while !remaining.is_empty() {
        let before = remaining.len();
        remaining.retain(|c| {
            let ready = c.parents().iter().all(|p| placed.contains(&p.name()));
            if ready {
                placed.extend(c.children().iter().map(Variable::name));
            }
            !ready
        });
        if remaining.len() == before {
            return Err(doc_err("network contains a directed cycle"));
        }
    }
    Ok(())
}

/// Constructive trace of a separable decomposition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceDoc {
    pub z1: usize,
    pub reference: Vec<(String, usize)>,
    pub baseline: TableDoc,
    pub deltas: Vec<TableDoc>,
    pub ranges: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeparableDoc {
    pub parents: Vec<String>,
    pub blocks: Vec<Vec<String>>,
    pub weights: Vec<f64>,
    pub components: Vec<CptDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<TraceDoc>,
}

impl SeparableDoc {
    pub fn from_core(d: &SeparableDecomposition) -> Self {
        SeparableDoc {
            parents: names(d.parents()),
            blocks: d.blocks().iter().map(|b| names(b)).collect(),
            weights: d.weights().to_vec(),
            components: d.components().iter().map(CptDoc::from_cpt).collect(),
            trace: d.trace().map(|t| TraceDoc {
                z1: t.z1,
                reference: t.reference.named(),
                baseline: TableDoc::from_factor(&t.baseline),
                deltas: t
                    .deltas
                    .iter()
                    .map(|d| TableDoc {
                        vars: names(&d.scope),
                        table: d.values.clone(),
                    })
                    .collect(),
                ranges: t.ranges.clone(),
            }),
        }
    }

    pub fn to_core(&self, catalog: &Catalog) -> Result<SeparableDecomposition> {
        if let Some(t) = &self.trace {
            catalog.assignment(&t.reference)?;
            t.baseline.to_factor(catalog)?;
            for d in &t.deltas {
                let scope = catalog.all(&d.vars)?;
                let size: usize = scope.iter().map(Variable::cardinality).product();
                if size != d.table.len() {
                    return Err(Error::TableLength {
                        expected: size,
                        found: d.table.len(),
                    });
                }
            }
        }
        SeparableDecomposition::from_parts(
            catalog.all(&self.parents)?,
            self.blocks
                .iter()
                .map(|b| catalog.all(b))
                .collect::<Result<_>>()?,
            self.weights.clone(),
            self.components
                .iter()
                .map(|c| c.to_cpt(catalog))
                .collect::<Result<_>>()?,
            &tol(),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContextDoc {
    pub context: Vec<(String, usize)>,
    pub decomposition: SeparableDoc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionalDoc {
    pub conditioning: Vec<String>,
    pub entries: Vec<ContextDoc>,
}

impl ConditionalDoc {
    pub fn from_core(d: &ConditionalDecomposition<f64>) -> Self {
        ConditionalDoc {
            conditioning: names(d.conditioning()),
            entries: d
                .entries()
                .iter()
                .map(|(ctx, sd)| ContextDoc {
                    context: ctx.named(),
                    decomposition: SeparableDoc::from_core(sd),
                })
                .collect(),
        }
    }

    fn validate(&self, catalog: &Catalog) -> Result<()> {
        let given = catalog.all(&self.conditioning)?;
        let size: usize = given.iter().map(Variable::cardinality).product();
        if self.entries.len() != size {
            return Err(doc_err("one entry per conditioning assignment required"));
        }
        for e in &self.entries {
            catalog.assignment(&e.context)?;
            e.decomposition.to_core(catalog)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchDoc {
    pub weights: Vec<f64>,
    pub blocks: Vec<Vec<String>>,
    pub children: Vec<NodeDoc>,
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NodeDoc {
    Leaf {
        leaf: CptDoc,
    },
    Node {
        conditioning: Vec<String>,
        branches: Vec<BranchDoc>,
    },
}

impl NodeDoc {
    fn from_core(n: &DecompNode<f64>) -> Self {
        match n {
            DecompNode::Leaf(c) => NodeDoc::Leaf {
                leaf: CptDoc::from_cpt(c),
            },
            DecompNode::Node {
                conditioning,
                branches,
            } => NodeDoc::Node {
                conditioning: names(conditioning),
                branches: branches
                    .iter()
                    .map(|b| BranchDoc {
                        weights: b.weights.clone(),
                        blocks: b.blocks.iter().map(|s| names(s)).collect(),
                        children: b.children.iter().map(NodeDoc::from_core).collect(),
                        degenerate: b.degenerate,
                    })
                    .collect(),
            },
        }
    }

    fn to_core(&self, catalog: &Catalog) -> Result<DecompNode<f64>> {
        Ok(match self {
            NodeDoc::Leaf { leaf } => DecompNode::Leaf(leaf.to_cpt(catalog)?),
            NodeDoc::Node {
                conditioning,
                branches,
            } => {
                let conditioning = catalog.all(conditioning)?;
                let size: usize = conditioning.iter().map(Variable::cardinality).product();
                if branches.len() != size {
                    return Err(doc_err("one branch per conditioning assignment required"));
                }
                DecompNode::Node {
                    conditioning,
                    branches: branches
                        .iter()
                        .map(|b| {
                            if b.weights.len() != b.children.len()
                                || b.blocks.len() != b.children.len()
                            {
                                return Err(doc_err(
                                    "branch weights, blocks and children differ in length",
                                ));
                            }
                            Ok(TreeBranch {
                                weights: b.weights.clone(),
                                blocks: b
                                    .blocks
                                    .iter()
                                    .map(|s| catalog.all(s))
                                    .collect::<Result<_>>()?,
                                children: b
                                    .children
                                    .iter()
                                    .map(|c| c.to_core(catalog))
                                    .collect::<Result<_>>()?,
                                degenerate: b.degenerate,
                            })
                        })
                        .collect::<Result<_>>()?,
                }
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeDecompositionDoc {
    pub children: Vec<String>,
    pub parents: Vec<String>,
    pub root: NodeDoc,
}

impl TreeDecompositionDoc {
    pub fn from_core(d: &TreeDecomposition) -> Self {
        TreeDecompositionDoc {
            children: names(d.children()),
            parents: names(d.parents()),
            root: NodeDoc::from_core(d.root()),
        }
    }

    pub fn to_core(&self, catalog: &Catalog) -> Result<TreeDecomposition> {
        let d = TreeDecomposition::from_parts(
            catalog.all(&self.parents)?,
            catalog.all(&self.children)?,
            self.root.to_core(catalog)?,
            &tol(),
        )?;
        // Every row must again be a distribution.
        d.reconstruct()?.validate(&tol())?;
        Ok(d)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DecompositionBody {
    Separable(SeparableDoc),
    Conditional(ConditionalDoc),
    Tree(TreeDecompositionDoc),
    /// One tree decomposition per subset of a dynamic model's family.
    Family(Vec<TreeDecompositionDoc>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecompositionDoc {
    pub variables: Vec<VariableDoc>,
    pub child: Vec<String>,
    pub decomposition: DecompositionBody,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckMethod {
    Oracle,
    Conditional,
    Tree,
    Family,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckDoc {
    pub target: Vec<String>,
    pub subsets: Vec<Vec<String>>,
    pub method: CheckMethod,
    pub sufficient: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

pub fn verification_name(v: Verification) -> &'static str {
    match v {
        Verification::Oracle => "oracle",
        Verification::Unverified => "unverified",
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformDoc {
    /// Original variables plus the introduced selectors.
    pub variables: Vec<VariableDoc>,
    pub selectors: Vec<String>,
    pub factors: Vec<TableDoc>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Marginal,
    Exact,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepDoc {
    pub t: usize,
    pub marginals: Vec<TableDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictionDoc {
    pub variables: Vec<VariableDoc>,
    pub engine: Engine,
    pub approximate: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub evidence: Vec<(String, usize)>,
    pub steps: Vec<StepDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComparisonDoc {
    pub subsets: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub query: Option<Vec<String>>,
    /// Largest absolute difference between the engines at each step.
    pub divergence: Vec<f64>,
    pub max_divergence: f64,
    pub cost: CostReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorDoc {
    pub kind: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl ErrorDoc {
    pub fn from_error(e: &Error) -> Self {
        let kind = format!("{e:?}");
        let kind = kind
            .split(|c: char| !c.is_alphanumeric())
            .next()
            .unwrap_or_default()
            .to_string();
        ErrorDoc {
            kind,
            message: e.to_string(),
            witness: e.witness().cloned(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum ResultDocument {
    Check(CheckDoc),
    Decomposition(DecompositionDoc),
    Transform(TransformDoc),
    Prediction(PredictionDoc),
    Comparison(ComparisonDoc),
    Error(ErrorDoc),
}

impl ResultDocument {
    /// Parses and re-validates every carried decomposition and table.
    pub fn load(text: &str) -> Result<Self> {
        let doc: ResultDocument = parse(text)?;
        doc.validate()?;
        Ok(doc)
    }

    pub fn save(&self) -> String {
        to_json(self)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ResultDocument::Decomposition(d) => {
                let catalog = Catalog::new(&d.variables)?;
                let child = catalog.all(&d.child)?;
                let check_child = |c: &[Variable]| {
                    if c == child.as_slice() {
                        Ok(())
                    } else {
                        Err(doc_err(
                            "decomposition child differs from the declared child",
                        ))
                    }
                };
                match &d.decomposition {
                    DecompositionBody::Separable(s) => check_child(s.to_core(&catalog)?.children()),
                    DecompositionBody::Conditional(c) => c.validate(&catalog),
                    DecompositionBody::Tree(t) => check_child(t.to_core(&catalog)?.children()),
                    DecompositionBody::Family(ts) => {
                        for t in ts {
                            t.to_core(&catalog)?;
                        }
                        Ok(())
                    }
                }
            }
            ResultDocument::Transform(t) => {
                let catalog = Catalog::new(&t.variables)?;
                catalog.all(&t.selectors)?;
                for f in &t.factors {
                    let f = f.to_factor(&catalog)?;
                    if f.values().iter().any(|v| *v < 0.0) {
                        return Err(doc_err("negative factor entry"));
                    }
                }
                Ok(())
            }
            ResultDocument::Prediction(p) => {
                let catalog = Catalog::new(&p.variables)?;
                catalog.assignment(&p.evidence)?;
                for (i, s) in p.steps.iter().enumerate() {
                    if s.t != i {
                        return Err(doc_err("steps must be numbered from 0 consecutively"));
                    }
                    let parts = s
                        .marginals
                        .iter()
                        .map(|m| m.to_factor(&catalog))
                        .collect::<Result<Vec<_>>>()?;
                    MarginalSet::new(parts, &tol())?;
                }
                Ok(())
            }
            ResultDocument::Comparison(c) => {
                if c.divergence.len() != c.cost.horizon + 1 {
                    return Err(doc_err("one divergence per step required"));
                }
                if c.divergence.iter().any(|d| d.is_nan() || *d < 0.0) {
                    return Err(doc_err("divergences must be nonnegative"));
                }
                Ok(())
            }
            ResultDocument::Check(_) | ResultDocument::Error(_) => Ok(()),
        }
    }
}
