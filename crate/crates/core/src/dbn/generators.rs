//! Ready-made dynamic models: wind-driven weather, the paired-copy
//! counterexample, and mixtures of information-flow modes over a tree of
//! subsystems.

use rand::Rng;

use crate::cpt::Cpt;
use crate::error::{Error, Result};
use crate::factor::Factor;
use crate::random;
use crate::scalar::{Scalar, Tolerances};
use crate::separability::{TreeNode, TreeRepresentation};
use crate::variable::{contains, space_size, Variable};

use super::model::{next_var, DbnModel, Initial};

/// Wind-driven weather over a ring of locations.
///
/// Each step the prevailing wind `W` evolves on its own; the weather at
/// location `i` is copied, through a noisy packet model `P_ij`, from one
/// source location `j` chosen with probability `selection[w][i][j]` given
/// the previous wind `w`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeatherModelSpec<T> {
    pub locations: usize,
    pub directions: usize,
    pub weather_cardinality: usize,
    /// `wind[w][w2] = P(W' = w2 | W = w)`.
    pub wind: Vec<Vec<T>>,
    /// `selection[w][i][j]`: probability that location `i` draws from `j`.
    pub selection: Vec<Vec<Vec<T>>>,
    /// `packets[i][j][x_j][x_i]`: weather at `i` given the source value at `j`.
    pub packets: Vec<Vec<Vec<Vec<T>>>>,
    /// Joint over `(W, X0, .., X{n-1})`.
    pub initial: Vec<T>,
}

impl<T: Scalar> WeatherModelSpec<T> {
    /// Random instance where each location draws either from itself or from
    /// its upwind ring neighbour (left for even directions, right for odd).
    pub fn random<R: Rng + ?Sized>(
        rng: &mut R,
        locations: usize,
        directions: usize,
        weather_cardinality: usize,
    ) -> Self {
        let n = locations;
        let wind = (0..directions)
            .map(|_| random::distribution(rng, directions))
            .collect();
        let selection = (0..directions)
            .map(|w| {
                (0..n)
                    .map(|i| {
                        let mut row = vec![T::zero(); n];
                        if n == 1 {
                            row[0] = T::one();
                            return row;
                        }
                        let upwind = if w % 2 == 0 {
                            (i + n - 1) % n
                        } else {
                            (i + 1) % n
                        };
                        let own = T::lit(rng.gen_range(0.2..0.8));
                        row[i] = own;
                        row[upwind] += T::one() - own;
                        row
                    })
                    .collect()
            })
            .collect();
        let packets = (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| {
                        (0..weather_cardinality)
                            .map(|_| random::distribution(rng, weather_cardinality))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let states = directions * weather_cardinality.pow(n as u32);
        WeatherModelSpec {
            locations,
            directions,
            weather_cardinality,
            wind,
            selection,
            packets,
            initial: random::distribution(rng, states),
        }
    }

    pub fn wind_var(&self) -> Result<Variable> {
        Variable::new("W", self.directions)
    }

    pub fn location_vars(&self) -> Result<Vec<Variable>> {
        (0..self.locations)
            .map(|i| Variable::new(format!("X{i}"), self.weather_cardinality))
            .collect()
    }

    fn validate(&self, tol: &Tolerances<T>) -> Result<()> {
        let (n, d, b) = (self.locations, self.directions, self.weather_cardinality);
        let bad = |what: &str| Err(Error::InvalidModel(format!("weather spec: {what}")));
        if n == 0 {
            return bad("no locations");
        }
        let is_dist = |row: &[T], len: usize| {
            row.len() == len
                && row.iter().all(|p| *p >= T::zero())
                && (row.iter().copied().sum::<T>() - T::one()).abs() <= tol.norm
        };
        if self.wind.len() != d || !self.wind.iter().all(|r| is_dist(r, d)) {
            return bad("wind rows must be distributions over directions");
        }
        if self.selection.len() != d
            || !self
                .selection
                .iter()
                .all(|per_w| per_w.len() == n && per_w.iter().all(|r| is_dist(r, n)))
        {
            return bad(
                "selection must hold a distribution over sources per direction and location",
            );
        }
        if self.packets.len() != n
            || !self.packets.iter().all(|per_i| {
                per_i.len() == n
                    && per_i
                        .iter()
                        .all(|m| m.len() == b && m.iter().all(|r| is_dist(r, b)))
            })
        {
            return bad("packet models must be conditionals for every location pair");
        }
        if self.initial.len() != d * b.pow(n as u32) {
            return bad("initial joint has the wrong length");
        }
        Ok(())
    }
}

/// Model, family `{W, X_i}` per location, and the tree joining those
/// subsets under a root where `W` is located.
pub fn make_weather<T: Scalar>(
    spec: &WeatherModelSpec<T>,
    tol: &Tolerances<T>,
) -> Result<(DbnModel<T>, Vec<Vec<Variable>>, TreeRepresentation)> {
    spec.validate(tol)?;
    let w = spec.wind_var()?;
    let xs = spec.location_vars()?;
    let mut state = vec![w.clone()];
    state.extend(xs.iter().cloned());

    let wind_rows = spec.wind.clone();
    let mut transitions = vec![Cpt::from_rows(vec![next_var(&w)], vec![w.clone()], |d| {
        wind_rows[d[0]].clone()
    })?];
    for (i, x) in xs.iter().enumerate() {
        let sources: Vec<usize> = (0..spec.locations)
            .filter(|&j| spec.selection.iter().any(|per_w| per_w[i][j] > T::zero()))
            .collect();
        let mut parents = vec![w.clone()];
        parents.extend(sources.iter().map(|&j| xs[j].clone()));
        let b = spec.weather_cardinality;
        transitions.push(Cpt::from_rows(vec![next_var(x)], parents, |d| {
            let mut row = vec![T::zero(); b];
            for (k, &j) in sources.iter().enumerate() {
                let g = spec.selection[d[0]][i][j];
                for (o, p) in row.iter_mut().zip(&spec.packets[i][j][d[1 + k]]) {
                    *o += g * *p;
                }
            }
            row
        })?);
    }
    let initial = Factor::new(state.clone(), spec.initial.clone())?;
    let model = DbnModel::new(state, transitions, Initial::Joint(initial), tol)?;
    let family: Vec<Vec<Variable>> = xs.iter().map(|x| vec![w.clone(), x.clone()]).collect();
    let tree = TreeRepresentation::star(&family)?;
    Ok((model, family, tree))
}

/// Joint `[0.4, 0.1, 0.1, 0.4]` over `(Z1, Z2)`.
pub fn figure5_default_initial<T: Scalar>() -> Result<Factor<T>> {
    let (z1, z2) = figure5_vars()?;
    Factor::new(
        vec![z1, z2],
        [0.4, 0.1, 0.1, 0.4].iter().map(|x| T::lit(*x)).collect(),
    )
}

fn figure5_vars() -> Result<(Variable, Variable)> {
    Ok((Variable::new("Z1", 2)?, Variable::new("Z2", 2)?))
}

/// Two binary variables, each a deterministic copy of its own previous
/// value. The singletons are self-sufficient; the pair's next value is not
/// determined by the singleton marginals.
pub fn make_figure5<T: Scalar>(initial: Option<Factor<T>>) -> Result<DbnModel<T>> {
    let (z1, z2) = figure5_vars()?;
    let initial = match initial {
        Some(j) => j,
        None => figure5_default_initial()?,
    };
    DbnModel::new(
        vec![z1.clone(), z2.clone()],
        vec![
            Cpt::copy_of(next_var(&z1), z1)?,
            Cpt::copy_of(next_var(&z2), z2)?,
        ],
        Initial::Joint(initial),
        &Tolerances::default(),
    )
}

/// How the next mode is drawn.
#[derive(Clone, Debug, PartialEq)]
pub enum ModeWeights<T> {
    /// Same mode distribution every step.
    Fixed(Vec<T>),
    /// Mode distribution given the previous values of root-level variables
    /// (which may include the mode variable itself), one row per joint
    /// assignment of `vars`.
    OnRoot {
        vars: Vec<String>,
        rows: Vec<Vec<T>>,
    },
}

/// Subsystems on a complete tree, driven by a mixture of information-flow
/// modes.
///
/// In mode `k`, subsystem `i` reads only the previous state of subsystem
/// `modes[k][i]`. A variable shared by several subsystems may therefore
/// only depend on variables common to all of their sources. The current
/// mode is an extra state variable present in every subsystem.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeSpec<T> {
    pub tree: TreeRepresentation,
    /// Per mode, the source subsystem (leaf index, depth-first) of each leaf.
    pub modes: Vec<Vec<usize>>,
    pub weights: ModeWeights<T>,
    /// `locals[k][v]`: next value of the `v`-th tree variable in mode `k`,
    /// with parents among the variables that mode allows.
    pub locals: Vec<Vec<Cpt<T>>>,
    /// Joint over the tree variables followed by the mode variable (omitted
    /// with a single mode).
    pub initial: Vec<T>,
}

pub const MODE_VAR: &str = "M";

impl<T: Scalar> ModeSpec<T> {
    /// Variables mode `k` allows as parents of `v`: those shared by the
    /// sources of every subsystem containing `v`, in tree-variable order.
    pub fn allowed_parents(
        tree: &TreeRepresentation,
        mode: &[usize],
        v: &Variable,
    ) -> Vec<Variable> {
        let leaves = tree.leaves();
        tree.variables()
            .into_iter()
            .filter(|u| {
                leaves
                    .iter()
                    .enumerate()
                    .filter(|(_, l)| contains(l, v))
                    .all(|(i, _)| contains(&leaves[mode[i]], u))
            })
            .collect()
    }

    /// Random local conditionals using every allowed parent, and a random
    /// initial joint.
    pub fn random<R: Rng + ?Sized>(
        rng: &mut R,
        tree: TreeRepresentation,
        modes: Vec<Vec<usize>>,
        weights: ModeWeights<T>,
    ) -> Result<Self> {
        let vars = tree.variables();
        let locals = modes
            .iter()
            .map(|mode| {
                vars.iter()
                    .map(|v| {
                        if mode.len() != tree.leaves().len() {
                            return Err(Error::InvalidModel(
                                "mode length differs from leaf count".into(),
                            ));
                        }
                        let parents = Self::allowed_parents(&tree, mode, v);
                        random::cpt(rng, vec![next_var(v)], parents)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let mode_card = if modes.len() > 1 { modes.len() } else { 1 };
        let initial = random::distribution(rng, space_size(&vars) * mode_card);
        Ok(ModeSpec {
            tree,
            modes,
            weights,
            locals,
            initial,
        })
    }

    fn mode_var(&self) -> Result<Option<Variable>> {
        match self.modes.len() {
            0 => Err(Error::InvalidModel("no modes".into())),
            1 => Ok(None),
            k => Variable::new(MODE_VAR, k).map(Some),
        }
    }
}

/// Leaf subsets with `extra` appended to each.
fn augment(node: &TreeNode, extra: &Option<Variable>) -> TreeNode {
    match node {
        TreeNode::Leaf(s) => {
            let mut s = s.clone();
            s.extend(extra.iter().cloned());
            TreeNode::Leaf(s)
        }
        TreeNode::Internal(c) => TreeNode::Internal(c.iter().map(|n| augment(n, extra)).collect()),
    }
}

/// Model, family (the tree's leaves plus the mode variable), and tree.
pub fn make_from_modes<T: Scalar>(
    spec: &ModeSpec<T>,
    tol: &Tolerances<T>,
) -> Result<(DbnModel<T>, Vec<Vec<Variable>>, TreeRepresentation)> {
    if !spec.tree.is_complete() {
        return Err(Error::InvalidTree(
            "mode models need a complete tree representation".into(),
        ));
    }
    let mode_var = spec.mode_var()?;
    let vars = spec.tree.variables();
    if vars.iter().any(|v| v.name() == MODE_VAR) {
        return Err(Error::DuplicateVariable(MODE_VAR.into()));
    }
    let leaves = spec.tree.leaves();
    for mode in &spec.modes {
        if mode.len() != leaves.len() || mode.iter().any(|&s| s >= leaves.len()) {
            return Err(Error::InvalidModel(
                "each mode must name one source leaf per leaf".into(),
            ));
        }
    }
    if spec.locals.len() != spec.modes.len() || spec.locals.iter().any(|l| l.len() != vars.len()) {
        return Err(Error::InvalidModel(
            "need one local conditional per mode and variable".into(),
        ));
    }

    let tree = TreeRepresentation::new(augment(spec.tree.root(), &mode_var))?;
    let family = tree.leaves();
    let mut state = vars.clone();
    state.extend(mode_var.iter().cloned());

    let mut transitions = Vec::with_capacity(state.len());
    for (idx, v) in vars.iter().enumerate() {
        let mut parents: Vec<Variable> = mode_var.iter().cloned().collect();
        for (k, mode) in spec.modes.iter().enumerate() {
            let local = &spec.locals[k][idx];
            let allowed = ModeSpec::<T>::allowed_parents(&spec.tree, mode, v);
            if local.children() != [next_var(v)] {
                return Err(Error::InvalidModel(format!(
                    "local conditional for `{v}` has the wrong child"
                )));
            }
            if let Some(p) = local.parents().iter().find(|p| !contains(&allowed, p)) {
                return Err(Error::InvalidModel(format!(
                    "mode {k} lets `{v}` read only {allowed:?}, not `{p}`"
                )));
            }
            local.validate(tol)?;
            for p in local.parents() {
                if !contains(&parents, p) {
                    parents.push(p.clone());
                }
            }
        }
        // Mode first, the rest in state order.
        let mut ordered: Vec<Variable> = mode_var.iter().cloned().collect();
        ordered.extend(vars.iter().filter(|u| contains(&parents, u)).cloned());
        let locals: Vec<Cpt<T>> = spec
            .locals
            .iter()
            .map(|per_mode| per_mode[idx].broadcast_parents(&ordered[mode_var.iter().count()..]))
            .collect::<Result<_>>()?;
        let rest = space_size(&ordered[mode_var.iter().count()..]);
        transitions.push(Cpt::from_rows(vec![next_var(v)], ordered, |d| {
            let (k, offset) = match &mode_var {
                Some(_) => (d[0], 1),
                None => (0, 0),
            };
            let mut x = 0;
            for (digit, u) in d[offset..].iter().zip(locals[k].parents()) {
                x = x * u.cardinality() + digit;
            }
            debug_assert!(x < rest);
            locals[k].row(x).to_vec()
        })?);
    }

    if let Some(m) = &mode_var {
        let k = spec.modes.len();
        let t = match &spec.weights {
            ModeWeights::Fixed(w) => {
                if w.len() != k {
                    return Err(Error::InvalidModel("one weight per mode".into()));
                }
                Cpt::from_rows(vec![next_var(m)], vec![], |_| w.clone())?
            }
            ModeWeights::OnRoot { vars: names, rows } => {
                let root = tree.root().located_here(&[]);
                let parents = names
                    .iter()
                    .map(|n| {
                        root.iter().find(|v| v.name() == n).cloned().ok_or_else(|| {
                            Error::InvalidModel(format!(
                                "mode weights may depend only on root-level variables, not `{n}`"
                            ))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                if rows.len() != space_size(&parents) || rows.iter().any(|r| r.len() != k) {
                    return Err(Error::InvalidModel(
                        "mode weight table has the wrong shape".into(),
                    ));
                }
                let cards: Vec<usize> = parents.iter().map(Variable::cardinality).collect();
                Cpt::from_rows(vec![next_var(m)], parents, |d| {
                    let i = d.iter().zip(&cards).fold(0, |acc, (x, c)| acc * c + x);
                    rows[i].clone()
                })?
            }
        };
        transitions.push(t);
    }

    let initial = Factor::new(state.clone(), spec.initial.clone())?;
    let model = DbnModel::new(state, transitions, Initial::Joint(initial), tol)?;
    Ok((model, family, tree))
}

/// Tree with root variable `V3`, an internal node sharing `V2` over leaves
/// `{V1,V2,V3}` and `{V2,V3,V4}`, and a leaf `{V3,V5}`.
pub fn figure6_tree(cardinality: usize) -> Result<TreeRepresentation> {
    let v = |i: usize| Variable::new(format!("V{i}"), cardinality);
    TreeRepresentation::new(TreeNode::Internal(vec![
        TreeNode::Internal(vec![
            TreeNode::Leaf(vec![v(1)?, v(2)?, v(3)?]),
            TreeNode::Leaf(vec![v(2)?, v(3)?, v(4)?]),
        ]),
        TreeNode::Leaf(vec![v(3)?, v(5)?]),
    ]))
}

/// Every subsystem reads its own previous state.
pub fn figure6_top_down() -> Vec<usize> {
    vec![0, 1, 2]
}

/// `{V2,V3,V4}` drives `{V1,V2,V3}` as well as itself.
pub fn figure6_take_over() -> Vec<usize> {
    vec![1, 1, 2]
}
