//! Versioned JSON persistence for boosted models.
//!
//! Document layout: top-level keys `format_version`, `base_score`,
//! `growth`, `feature_names`, `trees`; trees are nested node objects with
//! `feature`/`threshold`/`cover`/`left`/`right` on internal nodes and
//! `value`/`cover` on leaves. Numbers round-trip exactly (serde_json emits
//! the shortest decimal that parses back to the same f64).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gbdt::{GBDTConfig, GBDTModel, Growth, Node, Tree};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum NodeDoc {
    Internal {
        feature: usize,
        threshold: f64,
        cover: f64,
        left: Box<NodeDoc>,
        right: Box<NodeDoc>,
    },
    Leaf {
        value: f64,
        cover: f64,
    },
}

#[derive(Serialize, Deserialize)]
struct ModelDoc {
    format_version: u32,
    base_score: f64,
    growth: Growth,
    feature_names: Vec<String>,
    trees: Vec<NodeDoc>,
}

fn node_to_doc(tree: &Tree, id: usize) -> NodeDoc {
    match &tree.nodes[id] {
        Node::Leaf { value, cover } => NodeDoc::Leaf {
            value: *value,
            cover: *cover,
        },
        Node::Internal {
            feature,
            threshold,
            left,
            right,
            cover,
        } => NodeDoc::Internal {
            feature: *feature,
            threshold: *threshold,
            cover: *cover,
            left: Box::new(node_to_doc(tree, *left)),
            right: Box::new(node_to_doc(tree, *right)),
        },
    }
}

fn doc_to_node(doc: &NodeDoc, nodes: &mut Vec<Node>) -> usize {
    let id = nodes.len();
    match doc {
        NodeDoc::Leaf { value, cover } => {
            nodes.push(Node::Leaf {
                value: *value,
                cover: *cover,
            });
            id
        }
        NodeDoc::Internal {
            feature,
            threshold,
            cover,
            left,
            right,
        } => {
            nodes.push(Node::Leaf {
                value: 0.0,
                cover: 0.0,
            }); // placeholder
            let left_id = doc_to_node(left, nodes);
            let right_id = doc_to_node(right, nodes);
            nodes[id] = Node::Internal {
                feature: *feature,
                threshold: *threshold,
                left: left_id,
                right: right_id,
                cover: *cover,
            };
            id
        }
    }
}

pub fn model_to_json(model: &GBDTModel) -> String {
    let doc = ModelDoc {
        format_version: FORMAT_VERSION,
        base_score: model.base_score,
        growth: model.config.growth,
        feature_names: model.feature_names.clone(),
        trees: model.trees.iter().map(|t| node_to_doc(t, 0)).collect(),
    };
    serde_json::to_string_pretty(&doc).expect("model document serializes")
}

pub fn model_from_json(json: &str) -> Result<GBDTModel> {
    let doc: ModelDoc =
        serde_json::from_str(json).map_err(|e| Error::ModelFormat(format!("model document: {e}")))?;
    if doc.format_version != FORMAT_VERSION {
        return Err(Error::ModelFormat(format!(
            "unknown format_version {} (expected {FORMAT_VERSION})",
            doc.format_version
        )));
    }
    let n_features = doc.feature_names.len();
    let mut trees = Vec::with_capacity(doc.trees.len());
    for node_doc in &doc.trees {
        let mut nodes = Vec::new();
        doc_to_node(node_doc, &mut nodes);
        let tree = Tree { nodes };
        for node in &tree.nodes {
            if let Node::Internal { feature, .. } = node {
                if *feature >= n_features {
                    return Err(Error::ModelFormat(format!(
                        "split references feature {feature} but only {n_features} names given"
                    )));
                }
            }
        }
        trees.push(tree);
    }
    Ok(GBDTModel {
        trees,
        base_score: doc.base_score,
        config: GBDTConfig {
            growth: doc.growth,
            ..GBDTConfig::default()
        },
        feature_names: doc.feature_names,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gbdt::{sigmoid, train};
    use crate::matrix::Matrix;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn round_trip_reproduces_margins_bit_for_bit() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rows: Vec<Vec<f64>> = (0..150)
            .map(|_| (0..4).map(|_| rng.gen_range(-5.0..5.0)).collect())
            .collect();
        let y: Vec<u8> = rows.iter().map(|r| u8::from(r[0] * r[1] > 0.0)).collect();
        let x = Matrix::from_rows(&rows).unwrap();
        let cfg = GBDTConfig {
            n_estimators: 15,
            max_depth: 4,
            subsample: 0.9,
            ..Default::default()
        };
        let model = train(&x, &y, &cfg).unwrap();
        let restored = model_from_json(&model_to_json(&model)).unwrap();
        for _ in 0..50 {
            let row: Vec<f64> = (0..4).map(|_| rng.gen_range(-6.0..6.0)).collect();
            let a = model.predict_margin(&row).unwrap();
            let b = restored.predict_margin(&row).unwrap();
            assert_eq!(a.to_bits(), b.to_bits(), "margins must round-trip exactly");
        }
        assert_eq!(model.feature_names, restored.feature_names);
    }

    #[test]
    fn unknown_version_rejected() {
        let json = r#"{"format_version":99,"base_score":0.0,"growth":"depth_wise","feature_names":[],"trees":[]}"#;
        let err = model_from_json(json).unwrap_err();
        assert!(err.to_string().contains("format_version"));
    }

    #[test]
    fn malformed_document_rejected() {
        assert!(model_from_json("{not json").is_err());
        // tree referencing an out-of-range feature
        let json = r#"{"format_version":1,"base_score":0.0,"growth":"depth_wise",
            "feature_names":["a"],
            "trees":[{"feature":3,"threshold":0.5,"cover":2.0,
                      "left":{"value":0.1,"cover":1.0},
                      "right":{"value":-0.1,"cover":1.0}}]}"#;
        assert!(model_from_json(json).is_err());
    }

    #[test]
    fn hand_written_single_leaf_document() {
        let json = r#"{
            "format_version": 1,
            "base_score": 0.25,
            "growth": "symmetric",
            "feature_names": ["a", "b"],
            "trees": [{"value": 0.5, "cover": 10.0}]
        }"#;
        let model = model_from_json(json).unwrap();
        assert_eq!(model.predict_proba(&[1.0, 2.0]).unwrap(), sigmoid(0.75));
        assert_eq!(model.predict_proba(&[-9.0, 4.0]).unwrap(), sigmoid(0.75));
    }
}
