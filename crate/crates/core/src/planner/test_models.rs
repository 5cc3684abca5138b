//! Hand-built models for planner tests: checkpoints written directly so
//! a test controls predictions and input gradients exactly.

use crate::clearancenet::ClearanceModel;
use crate::cspace::ExtendedConfig;

/// Build a model by writing its checkpoint JSON directly. `layers` holds
/// (weight, bias) per layer with weights laid out fan-in by fan-out.
pub(crate) fn handmade_model(
    env_name: &str,
    d_e: usize,
    layers: &[(Vec<Vec<f64>>, Vec<f64>)],
) -> ClearanceModel {
    let hidden = layers[0].1.len();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    let v = serde_json::json!({
        "version": 1,
        "env_name": env_name,
        "layer_sizes": [d_e, hidden, hidden, 1],
        "activation": "rectifier",
        "input_mean": vec![0.0; d_e],
        "input_std": vec![1.0; d_e],
        "layers": layers
            .iter()
            .map(|(w, b)| serde_json::json!({ "weight": w, "bias": b }))
            .collect::<Vec<_>>(),
        "train_config": serde_json::Value::Null,
        "final_train_mse": serde_json::Value::Null,
        "final_eval_mse": serde_json::Value::Null,
    });
    std::fs::write(&path, serde_json::to_string(&v).unwrap()).unwrap();
    crate::clearancenet::load_model(&path).unwrap()
}

/// Net that predicts `value` everywhere; its input gradient is zero.
pub(crate) fn constant_model(env_name: &str, d_e: usize, value: f64) -> ClearanceModel {
    let model = handmade_model(
        env_name,
        d_e,
        &[
            (vec![vec![0.0; 2]; d_e], vec![0.0; 2]),
            (vec![vec![0.0; 2]; 2], vec![0.0; 2]),
            (vec![vec![0.0]; 2], vec![value]),
        ],
    );
    let probe = ExtendedConfig::robot_only(vec![0.25; d_e]);
    assert_eq!(model.forward(&probe).unwrap(), value);
    model
}

/// Net whose input gradient is `grad` at every point in the joint range:
/// one live hidden unit biased deep into the linear region, one dead
/// unit.
pub(crate) fn affine_model(env_name: &str, grad: &[f64]) -> ClearanceModel {
    let w1: Vec<Vec<f64>> = grad.iter().map(|&g| vec![g, 0.0]).collect();
    handmade_model(
        env_name,
        grad.len(),
        &[
            (w1, vec![100.0, 0.0]),
            (vec![vec![1.0, 0.0], vec![0.0, 0.0]], vec![0.0, 0.0]),
            (vec![vec![1.0], vec![0.0]], vec![0.0]),
        ],
    )
}
