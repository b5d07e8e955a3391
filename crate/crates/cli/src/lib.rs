//! Command-line workflows over model documents: sufficiency checks,
//! decompositions, network transformation, propagation and comparison of
//! the marginal and exact engines, and ready-made demo models.

pub mod document;

use std::fs;
use std::io::Read;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use sepinfer::dbn::{
    check_self_sufficient, cost_report, figure6_take_over, figure6_top_down, figure6_tree,
    filter_joint, filter_step, make_figure5, make_from_modes, make_weather, next_name,
    predict_exact, predict_marginals, FilterPolicy, ModeSpec, ModeWeights, WeatherModelSpec,
};
use sepinfer::random;
use sepinfer::separability::{
    conditional_separate_n, separate_n, sufficiency_oracle, tree_separate, TreeRepresentation,
};
use sepinfer::transform::{transform_network, Annotation};
use sepinfer::{Assignment, Cpt, DbnModel, Error, MarginalSet, Tolerances, Variable};

use document::{
    names, variable_docs, Catalog, CheckDoc, CheckMethod, ComparisonDoc, ConditionalDoc,
    DecompositionBody, DecompositionDoc, Engine, ErrorDoc, Kind, ModelDocument, PredictionDoc,
    ResultDocument, SeparableDoc, StepDoc, TableDoc, TransformDoc, TreeDecompositionDoc,
};

#[derive(Debug, Parser)]
#[command(
    name = "sepinfer",
    version,
    about = "Separability checks and exact marginal propagation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether subset marginals determine a node or a dynamic family.
    Check(ModelArgs),
    /// Emit the decomposition behind a positive check.
    Decompose(ModelArgs),
    /// Rewrite a node as a selector sum of products.
    Transform(ModelArgs),
    /// Propagate a dynamic model's marginals.
    Predict(PredictArgs),
    /// Run the marginal and exact engines side by side.
    Compare(CompareArgs),
    /// Print a ready-made model document.
    Demo(DemoArgs),
}

#[derive(Debug, Args)]
pub struct Io {
    /// Model document; standard input when absent or `-`.
    pub model: Option<PathBuf>,
    /// Write the result here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[command(flatten)]
    pub io: Io,
    /// Network node to examine.
    #[arg(long)]
    pub node: Option<String>,
    /// Parent subsets, each comma-separated (e.g. `X,W W,Y`).
    #[arg(long, num_args = 1..)]
    pub blocks: Vec<String>,
    /// Comma-separated variables shared by the blocks.
    #[arg(long)]
    pub given: Option<String>,
    /// Use the document's tree representation.
    #[arg(long)]
    pub tree: bool,
    /// Subsystem family of a dynamic model, each subset comma-separated.
    #[arg(long, num_args = 1..)]
    pub family: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Policy {
    Strict,
    Demonstrate,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[command(flatten)]
    pub io: Io,
    #[arg(long, num_args = 1..)]
    pub family: Vec<String>,
    /// Horizon.
    #[arg(long, default_value_t = 10)]
    pub steps: usize,
    /// Propagate the full joint instead of subset marginals.
    #[arg(long)]
    pub exact: bool,
    #[arg(long, value_enum, default_value_t = Policy::Strict)]
    pub policy: Policy,
    /// Observations at the final step, `VAR=VAL[,VAR=VAL...]`.
    #[arg(long)]
    pub evidence: Option<String>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub io: Io,
    #[arg(long, num_args = 1..)]
    pub family: Vec<String>,
    #[arg(long, default_value_t = 10)]
    pub steps: usize,
    /// Comma-separated variables whose joint is compared, built from the
    /// family marginals as if subsets were independent.
    #[arg(long)]
    pub query: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DemoName {
    Weather,
    Figure5,
    Modes,
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    pub name: DemoName,
    #[arg(long, default_value_t = 4)]
    pub locations: usize,
    #[arg(long, default_value_t = 4)]
    pub directions: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Exit code with the text destined for standard output and error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

enum Failure {
    Usage(String),
    Structural(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_structural() {
            Failure::Structural(e)
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

type Res<T> = std::result::Result<T, Failure>;

/// Parses arguments (program name first) and runs the command.
pub fn run_from<I, S>(args: I, stdin: &mut dyn Read) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli, stdin),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            }
        }
    }
}

pub fn run(cli: Cli, stdin: &mut dyn Read) -> Outcome {
    let (output, result) = match &cli.command {
        Command::Check(a) => (&a.io.output, cmd_check(a, stdin)),
        Command::Decompose(a) => (&a.io.output, cmd_decompose(a, stdin)),
        Command::Transform(a) => (&a.io.output, cmd_transform(a, stdin)),
        Command::Predict(a) => (&a.io.output, cmd_predict(a, stdin)),
        Command::Compare(a) => (&a.io.output, cmd_compare(a, stdin)),
        Command::Demo(a) => (&a.output, cmd_demo(a)),
    };
    let (code, text) = match result {
        Ok((code, text)) => (code, text),
        Err(Failure::Structural(e)) => (
            EXIT_NEGATIVE,
            ResultDocument::Error(ErrorDoc::from_error(&e)).save(),
        ),
        Err(Failure::Usage(msg)) => {
            return Outcome {
                code: EXIT_USAGE,
                stdout: String::new(),
                stderr: format!("error: {msg}\n"),
            }
        }
    };
    match output {
        Some(path) => match fs::write(path, &text) {
            Ok(()) => Outcome {
                code,
                stdout: String::new(),
                stderr: String::new(),
            },
            Err(e) => Outcome {
                code: EXIT_USAGE,
                stdout: String::new(),
                stderr: format!("error: cannot write {}: {e}\n", path.display()),
            },
        },
        None => Outcome {
            code,
            stdout: text,
            stderr: String::new(),
        },
    }
}

fn tol() -> Tolerances<f64> {
    Tolerances::default()
}

fn read_model(io: &Io, stdin: &mut dyn Read) -> Res<ModelDocument> {
    let text = match io.model.as_deref() {
        Some(p) if p.as_os_str() != "-" => fs::read_to_string(p)
            .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", p.display())))?,
        _ => {
            let mut s = String::new();
            stdin
                .read_to_string(&mut s)
                .map_err(|e| Failure::Usage(format!("cannot read standard input: {e}")))?;
            s
        }
    };
    Ok(ModelDocument::load(&text)?)
}

fn split_names(list: &str) -> Vec<String> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(String::from)
        .collect()
}

fn parse_sets(catalog: &Catalog, raw: &[String]) -> Res<Vec<Vec<Variable>>> {
    raw.iter()
        .map(|s| catalog.all(&split_names(s)).map_err(Failure::from))
        .collect()
}

fn parse_evidence(catalog: &Catalog, raw: &str) -> Res<Assignment> {
    let pairs = split_names(raw)
        .into_iter()
        .map(|item| {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| Failure::Usage(format!("evidence `{item}` is not VAR=VAL")))?;
            let value = value.trim().parse::<usize>().map_err(|_| {
                Failure::Usage(format!("evidence value in `{item}` is not a number"))
            })?;
            Ok((catalog.get(name.trim())?, value))
        })
        .collect::<Res<Vec<_>>>()?;
    Ok(Assignment::new(pairs)?)
}

fn node_cpt(doc: &ModelDocument, node: &Option<String>) -> Res<(Vec<Cpt>, Cpt)> {
    let node = node
        .as_deref()
        .ok_or_else(|| Failure::Usage("--node is required for network documents".into()))?;
    let cpts = doc.to_network()?;
    let cpt = cpts
        .iter()
        .find(|c| c.children().iter().any(|v| v.name() == node))
        .cloned()
        .ok_or_else(|| Failure::Usage(format!("no node `{node}`")))?;
    Ok((cpts, cpt))
}

fn doc_tree(doc: &ModelDocument) -> Res<TreeRepresentation> {
    doc.tree()?
        .ok_or_else(|| Failure::Usage("--tree needs a document with a `tree`".into()))
}

/// Family from flags, else from the document. The document tree is used
/// when its leaves match the family; otherwise the family's star tree.
fn dbn_family(
    doc: &ModelDocument,
    flags: &[String],
) -> Res<Option<(Vec<Vec<Variable>>, TreeRepresentation)>> {
    let catalog = doc.catalog()?;
    let family = if flags.is_empty() {
        match doc.family()? {
            Some(f) => f,
            None => return Ok(None),
        }
    } else {
        parse_sets(&catalog, flags)?
    };
    let same =
        |a: &[Variable], b: &[Variable]| a.len() == b.len() && a.iter().all(|v| b.contains(v));
    let tree = match doc.tree()? {
        Some(t)
            if t.leaves().len() == family.len()
                && family.iter().all(|s| t.leaves().iter().any(|l| same(s, l))) =>
        {
            t
        }
        _ => TreeRepresentation::star(&family)?,
    };
    Ok(Some((family, tree)))
}

fn require_family(
    doc: &ModelDocument,
    flags: &[String],
) -> Res<(Vec<Vec<Variable>>, TreeRepresentation)> {
    dbn_family(doc, flags)?
        .ok_or_else(|| Failure::Usage("no family: pass --family or add one to the document".into()))
}

fn result(code: i32, doc: ResultDocument) -> Res<(i32, String)> {
    Ok((code, doc.save()))
}

fn cmd_check(a: &ModelArgs, stdin: &mut dyn Read) -> Res<(i32, String)> {
    let doc = read_model(&a.io, stdin)?;
    let catalog = doc.catalog()?;
    let negative = |target, subsets, method, e: Error| {
        if !e.is_structural() {
            return Err(Failure::from(e));
        }
        result(
            EXIT_NEGATIVE,
            ResultDocument::Check(CheckDoc {
                target,
                subsets,
                method,
                sufficient: false,
                verification: None,
                reason: Some(e.to_string()),
                witness: e.witness().cloned(),
            }),
        )
    };
    let positive = |target, subsets, method, verification: Option<&str>| {
        result(
            EXIT_OK,
            ResultDocument::Check(CheckDoc {
                target,
                subsets,
                method,
                sufficient: true,
                verification: verification.map(String::from),
                reason: None,
                witness: None,
            }),
        )
    };

    if doc.kind == Kind::Dbn {
        let (family, tree) = require_family(&doc, &a.family)?;
        let model = doc.to_dbn()?;
        let target = names(model.state());
        let subsets: Vec<Vec<String>> = family.iter().map(|s| names(s)).collect();
        return match check_self_sufficient(&model, &family, &tree, &tol()) {
            Ok(f) => positive(
                target,
                subsets,
                CheckMethod::Family,
                Some(document::verification_name(f.verification())),
            ),
            Err(e) => negative(target, subsets, CheckMethod::Family, e),
        };
    }

    let (_, cpt) = node_cpt(&doc, &a.node)?;
    let target = names(cpt.children());
    if a.tree {
        let tree = doc_tree(&doc)?;
        let subsets = tree.leaves().iter().map(|s| names(s)).collect();
        return match tree_separate(&cpt, &tree, &tol()) {
            Ok(_) => positive(target, subsets, CheckMethod::Tree, None),
            Err(e) => negative(target, subsets, CheckMethod::Tree, e),
        };
    }
    let sets = parse_sets(&catalog, &a.blocks)?;
    if sets.is_empty() {
        return Err(Failure::Usage("--blocks or --tree is required".into()));
    }
    let subsets: Vec<Vec<String>> = sets.iter().map(|s| names(s)).collect();
    if let Some(given) = &a.given {
        let given = catalog.all(&split_names(given))?;
        return match conditional_separate_n(&cpt, &sets, &given, &tol()) {
            Ok(_) => positive(target, subsets, CheckMethod::Conditional, None),
            Err(e) => negative(target, subsets, CheckMethod::Conditional, e),
        };
    }
    if sufficiency_oracle(&cpt, &sets, &tol())? {
        positive(target, subsets, CheckMethod::Oracle, None)
    } else {
        // Disjoint blocks admit a witness cell from the constructive test.
        let e = match separate_n(&cpt, &sets, &tol()) {
            Err(e) if e.is_structural() => e,
            _ => Error::InvalidBlocks("subset marginals do not determine the child".into()),
        };
        result(
            EXIT_NEGATIVE,
            ResultDocument::Check(CheckDoc {
                target,
                subsets,
                method: CheckMethod::Oracle,
                sufficient: false,
                verification: None,
                reason: Some(e.to_string()),
                witness: e.witness().cloned(),
            }),
        )
    }
}

fn cmd_decompose(a: &ModelArgs, stdin: &mut dyn Read) -> Res<(i32, String)> {
    let doc = read_model(&a.io, stdin)?;
    let catalog = doc.catalog()?;
    let variables = doc.variables.clone();

    if doc.kind == Kind::Dbn {
        let (family, tree) = require_family(&doc, &a.family)?;
        let model = doc.to_dbn()?;
        let f = check_self_sufficient(&model, &family, &tree, &tol())?;
        let child: Vec<String> = model.state().iter().map(|v| next_name(v.name())).collect();
        return result(
            EXIT_OK,
            ResultDocument::Decomposition(DecompositionDoc {
                variables,
                child,
                decomposition: DecompositionBody::Family(
                    f.decompositions()
                        .iter()
                        .map(TreeDecompositionDoc::from_core)
                        .collect(),
                ),
            }),
        );
    }

    let (_, cpt) = node_cpt(&doc, &a.node)?;
    let child = names(cpt.children());
    let body =
        if a.tree {
            DecompositionBody::Tree(TreeDecompositionDoc::from_core(&tree_separate(
                &cpt,
                &doc_tree(&doc)?,
                &tol(),
            )?))
        } else {
            let sets = parse_sets(&catalog, &a.blocks)?;
            if sets.is_empty() {
                return Err(Failure::Usage("--blocks or --tree is required".into()));
            }
            match &a.given {
                Some(given) => {
                    let given = catalog.all(&split_names(given))?;
                    DecompositionBody::Conditional(ConditionalDoc::from_core(
                        &conditional_separate_n(&cpt, &sets, &given, &tol())?,
                    ))
                }
                None => DecompositionBody::Separable(SeparableDoc::from_core(&separate_n(
                    &cpt,
                    &sets,
                    &tol(),
                )?)),
            }
        };
    result(
        EXIT_OK,
        ResultDocument::Decomposition(DecompositionDoc {
            variables,
            child,
            decomposition: body,
        }),
    )
}

fn cmd_transform(a: &ModelArgs, stdin: &mut dyn Read) -> Res<(i32, String)> {
    let doc = read_model(&a.io, stdin)?;
    let catalog = doc.catalog()?;
    let (cpts, cpt) = node_cpt(&doc, &a.node)?;
    let blocks = parse_sets(&catalog, &a.blocks)?;
    if blocks.is_empty() {
        return Err(Failure::Usage("--blocks is required".into()));
    }
    let annotation = Annotation {
        child: cpt.children()[0].name().to_string(),
        blocks,
    };
    let t = transform_network(&cpts, &[annotation], &tol())?;
    let mut variables = doc.variables.clone();
    variables.extend(variable_docs(&t.selectors));
    result(
        EXIT_OK,
        ResultDocument::Transform(TransformDoc {
            variables,
            selectors: names(&t.selectors),
            factors: t.factors.iter().map(TableDoc::from_factor).collect(),
        }),
    )
}

fn step_docs(sets: &[MarginalSet]) -> Vec<StepDoc> {
    sets.iter()
        .enumerate()
        .map(|(t, m)| StepDoc {
            t,
            marginals: m.marginals().iter().map(TableDoc::from_factor).collect(),
        })
        .collect()
}

fn dbn_model(doc: &ModelDocument) -> Res<DbnModel> {
    if doc.kind != Kind::Dbn {
        return Err(Failure::Usage("expected a dbn document".into()));
    }
    Ok(doc.to_dbn()?)
}

fn cmd_predict(a: &PredictArgs, stdin: &mut dyn Read) -> Res<(i32, String)> {
    let doc = read_model(&a.io, stdin)?;
    let model = dbn_model(&doc)?;
    let catalog = doc.catalog()?;
    let (family, tree) = match dbn_family(&doc, &a.family)? {
        Some(ft) => ft,
        None => {
            let whole = vec![model.state().to_vec()];
            let tree = TreeRepresentation::star(&whole)?;
            (whole, tree)
        }
    };
    let evidence = match &a.evidence {
        Some(raw) => parse_evidence(&catalog, raw)?,
        None => Assignment::empty(),
    };
    let (mut steps, engine) = if a.exact {
        let joints = predict_exact(&model, a.steps)?;
        let mut sets = Vec::with_capacity(joints.len());
        for (t, j) in joints.iter().enumerate() {
            let j = if t == a.steps && !evidence.is_empty() {
                filter_joint(j, &evidence)?
            } else {
                j.clone()
            };
            sets.push(MarginalSet::from_joint(&j, &family)?);
        }
        (sets, Engine::Exact)
    } else {
        let f = check_self_sufficient(&model, &family, &tree, &tol())?;
        let mut sets = predict_marginals(&f, &model, a.steps, &tol())?;
        if !evidence.is_empty() {
            let policy = match a.policy {
                Policy::Strict => FilterPolicy::Strict,
                Policy::Demonstrate => FilterPolicy::Demonstrate,
            };
            let last = sets.pop().expect("horizon 0 still yields the initial step");
            sets.push(filter_step(&f, &last, &evidence, policy)?);
        }
        (sets, Engine::Marginal)
    };
    let approximate = steps.iter().any(MarginalSet::is_approximate);
    let steps = step_docs(&std::mem::take(&mut steps));
    result(
        EXIT_OK,
        ResultDocument::Prediction(PredictionDoc {
            variables: doc.variables.clone(),
            engine,
            approximate,
            evidence: evidence.named(),
            steps,
        }),
    )
}

fn cmd_compare(a: &CompareArgs, stdin: &mut dyn Read) -> Res<(i32, String)> {
    let doc = read_model(&a.io, stdin)?;
    let model = dbn_model(&doc)?;
    let catalog = doc.catalog()?;
    let (family, tree) = require_family(&doc, &a.family)?;
    let query = a
        .query
        .as_ref()
        .map(|q| catalog.all(&split_names(q)))
        .transpose()?;
    let f = check_self_sufficient(&model, &family, &tree, &tol())?;
    let marginals = predict_marginals(&f, &model, a.steps, &tol())?;
    let exact = predict_exact(&model, a.steps)?;
    let divergence = marginals
        .iter()
        .zip(&exact)
        .map(|(m, j)| match &query {
            Some(q) => m
                .independent_product(q)?
                .max_abs_diff(&j.marginalize_to(q)?),
            None => m.max_abs_diff(&MarginalSet::from_joint(j, &family)?),
        })
        .collect::<sepinfer::Result<Vec<f64>>>()?;
    let max_divergence = divergence.iter().copied().fold(0.0, f64::max);
    let cost = cost_report(&f, &model, a.steps, &tol())?;
    result(
        EXIT_OK,
        ResultDocument::Comparison(ComparisonDoc {
            subsets: family.iter().map(|s| names(s)).collect(),
            query: query.map(|q| names(&q)),
            divergence,
            max_divergence,
            cost,
        }),
    )
}

/// Ready-made model documents, deterministic in their arguments.
pub fn demo_document(
    name: DemoName,
    locations: usize,
    directions: usize,
    seed: u64,
) -> sepinfer::Result<ModelDocument> {
    let mut rng = random::rng(seed);
    match name {
        DemoName::Weather => {
            let spec = WeatherModelSpec::random(&mut rng, locations, directions, 2);
            let (model, family, tree) = make_weather(&spec, &tol())?;
            Ok(ModelDocument::dbn(&model, Some(&family), Some(&tree)))
        }
        DemoName::Figure5 => {
            let model = make_figure5(None)?;
            let family: Vec<Vec<Variable>> =
                model.state().iter().map(|v| vec![v.clone()]).collect();
            let tree = TreeRepresentation::star(&family)?;
            Ok(ModelDocument::dbn(&model, Some(&family), Some(&tree)))
        }
        DemoName::Modes => {
            let spec = ModeSpec::random(
                &mut rng,
                figure6_tree(2)?,
                vec![figure6_top_down(), figure6_take_over()],
                ModeWeights::Fixed(vec![0.5, 0.5]),
            )?;
            let (model, family, tree) = make_from_modes(&spec, &tol())?;
            Ok(ModelDocument::dbn(&model, Some(&family), Some(&tree)))
        }
    }
}

fn cmd_demo(a: &DemoArgs) -> Res<(i32, String)> {
    let doc = demo_document(a.name, a.locations, a.directions, a.seed)?;
    Ok((EXIT_OK, doc.save()))
}
