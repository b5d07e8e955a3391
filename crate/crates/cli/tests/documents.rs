use rand::Rng;

use sepinfer::random;
use sepinfer::separability::{separate_n, tree_separate, TreeNode, TreeRepresentation};
use sepinfer::{Cpt, Error, Tolerances, Variable};
use sepinfer_cli::document::{
    to_json, variable_docs, CptDoc, DecompositionBody, DecompositionDoc, InitialDoc, ModelDocument,
    ResultDocument, SeparableDoc, TreeDecompositionDoc, TreeDoc,
};
use sepinfer_cli::{demo_document, DemoName};

fn var(name: &str, card: usize) -> Variable {
    Variable::new(name, card).unwrap()
}

fn tol() -> Tolerances<f64> {
    Tolerances::default()
}

fn random_network(rng: &mut impl Rng) -> Vec<Cpt> {
    let n = rng.gen_range(1..=4);
    let vars: Vec<Variable> = (0..n)
        .map(|i| var(&format!("N{i}"), rng.gen_range(2..=4)))
        .collect();
    vars.iter()
        .enumerate()
        .map(|(i, v)| {
            let parents: Vec<Variable> = vars[..i]
                .iter()
                .filter(|_| rng.gen_bool(0.5))
                .cloned()
                .collect();
            random::cpt(rng, vec![v.clone()], parents).unwrap()
        })
        .collect()
}

#[test]
fn floats_use_seventeen_significant_digits() {
    let text = to_json(&vec![0.1f64, 1.0, 2.0f64.sqrt()]);
    assert!(text.contains("1.0000000000000001e-1"), "{text}");
    assert!(text.contains("1.0000000000000000e0"));
    let back: Vec<f64> = serde_json::from_str(&text).unwrap();
    assert_eq!(back[2].to_bits(), 2.0f64.sqrt().to_bits());
}

#[test]
fn extreme_values_round_trip_bit_exactly() {
    let values = vec![
        f64::MIN_POSITIVE,
        5e-324,
        f64::MAX,
        1.0 - f64::EPSILON / 2.0,
        1.0 / 3.0,
        0.0,
        123_456_789.123_456_79,
    ];
    let back: Vec<f64> = serde_json::from_str(&to_json(&values)).unwrap();
    for (a, b) in values.iter().zip(&back) {
        assert_eq!(a.to_bits(), b.to_bits());
    }
}

#[test]
fn network_documents_round_trip() {
    let mut rng = random::rng(1);
    for _ in 0..30 {
        let net = random_network(&mut rng);
        let doc = ModelDocument::network(&net);
        let text = doc.save();
        let back = ModelDocument::load(&text).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.save(), text);
        assert_eq!(back.to_network().unwrap(), net);
    }
}

#[test]
fn dbn_documents_round_trip_through_the_model() {
    for name in [DemoName::Weather, DemoName::Figure5, DemoName::Modes] {
        let doc = demo_document(name, 3, 2, 7).unwrap();
        let back = ModelDocument::load(&doc.save()).unwrap();
        assert_eq!(back, doc);
        let model = back.to_dbn().unwrap();
        let family = back.family().unwrap().unwrap();
        let tree = back.tree().unwrap().unwrap();
        let again = ModelDocument::dbn(&model, Some(&family), Some(&tree));
        assert_eq!(again, doc);
    }
}

#[test]
fn marginal_initial_states_are_accepted() {
    let mut doc = demo_document(DemoName::Weather, 2, 2, 1).unwrap();
    let model = doc.to_dbn().unwrap();
    let family = doc.family().unwrap().unwrap();
    let m = model.initial_marginals(&family).unwrap();
    doc.initial = Some(InitialDoc::Marginals(
        m.marginals()
            .iter()
            .map(sepinfer_cli::document::TableDoc::from_factor)
            .collect(),
    ));
    let back = ModelDocument::load(&doc.save()).unwrap();
    assert!(back.to_dbn().unwrap().initial_joint().is_none());
}

#[test]
fn decomposition_results_revalidate_on_load() {
    let mut rng = random::rng(2);
    let (a, b, z) = (var("A", 3), var("B", 2), var("Z", 2));
    let cpt = random::mixture(
        &mut rng,
        vec![z.clone()],
        &[vec![a.clone()], vec![b.clone()]],
        &[0.3, 0.7],
    )
    .unwrap();
    let d = separate_n(&cpt, &[vec![a.clone()], vec![b.clone()]], &tol()).unwrap();
    let doc = ResultDocument::Decomposition(DecompositionDoc {
        variables: variable_docs(&[a.clone(), b.clone(), z.clone()]),
        child: vec!["Z".into()],
        decomposition: DecompositionBody::Separable(SeparableDoc::from_core(&d)),
    });
    let text = doc.save();
    assert_eq!(ResultDocument::load(&text).unwrap(), doc);

    // Break the mixture weights.
    let mut bad = doc.clone();
    if let ResultDocument::Decomposition(DecompositionDoc {
        decomposition: DecompositionBody::Separable(s),
        ..
    }) = &mut bad
    {
        s.weights[0] += 0.25;
    }
    assert!(ResultDocument::load(&bad.save()).is_err());
}

#[test]
fn tree_decomposition_results_revalidate_on_load() {
    let mut rng = random::rng(3);
    let (w, x, y, z) = (var("W", 2), var("X", 2), var("Y", 2), var("Z", 2));
    let tree = TreeRepresentation::new(TreeNode::Internal(vec![
        TreeNode::Leaf(vec![w.clone(), x.clone()]),
        TreeNode::Leaf(vec![w.clone(), y.clone()]),
    ]))
    .unwrap();
    let cpt = random::cpt(&mut rng, vec![z.clone()], vec![w.clone()])
        .unwrap()
        .broadcast_parents(&[w.clone(), x.clone(), y.clone()])
        .unwrap();
    let d = tree_separate(&cpt, &tree, &tol()).unwrap();
    let doc = ResultDocument::Decomposition(DecompositionDoc {
        variables: variable_docs(&[w, x, y, z]),
        child: vec!["Z".into()],
        decomposition: DecompositionBody::Tree(TreeDecompositionDoc::from_core(&d)),
    });
    assert_eq!(ResultDocument::load(&doc.save()).unwrap(), doc);
}

#[test]
fn malformed_models_are_rejected() {
    let good = demo_document(DemoName::Figure5, 0, 0, 0).unwrap();

    let mut neg = good.clone();
    neg.transitions[0].table[0] = -0.5;
    neg.transitions[0].table[1] = 1.5;
    assert!(ModelDocument::load(&neg.save()).is_err());

    let mut unknown = good.save();
    unknown = unknown.replacen("\"kind\"", "\"extra\": 1,\n  \"kind\"", 1);
    assert!(matches!(
        ModelDocument::load(&unknown),
        Err(Error::Document(_))
    ));

    let mut wrong_vars = good.clone();
    wrong_vars.tree = Some(TreeDoc::Node {
        vars: vec!["Z2".into()],
        children: vec![
            TreeDoc::Leaf {
                leaf: vec!["Z1".into()],
            },
            TreeDoc::Leaf {
                leaf: vec!["Z2".into()],
            },
        ],
    });
    assert!(ModelDocument::load(&wrong_vars.save()).is_err());

    let mut unprimed = good.clone();
    unprimed.transitions[0].child = vec!["Z1".into()];
    assert!(ModelDocument::load(&unprimed.save()).is_err());

    let x = var("X", 2);
    let cyclic = ModelDocument {
        cpts: vec![
            CptDoc {
                child: vec!["X".into()],
                parents: vec!["Y".into()],
                table: vec![1.0, 0.0, 0.0, 1.0],
            },
            CptDoc {
                child: vec!["Y".into()],
                parents: vec!["X".into()],
                table: vec![1.0, 0.0, 0.0, 1.0],
            },
        ],
        variables: variable_docs(&[x, var("Y", 2)]),
        ..ModelDocument::network(&[])
    };
    assert!(ModelDocument::load(&cyclic.save()).is_err());
}
