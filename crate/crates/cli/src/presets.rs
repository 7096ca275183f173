//! Embedded experiment presets, runnable as `--preset <name>`.

/// Names of the shipped presets.
pub const PRESET_NAMES: [&str; 5] = [
    "figure1-plane",
    "figure1-sphere",
    "figure1-hyperbolic",
    "reflector-a3s",
    "sphere-diagonal-43",
];

pub fn preset_json(name: &str) -> Option<&'static str> {
    // the Figure-1 geodesics are tilted against the grid so that region
    // boundaries cross cell columns gradually; masses then resolve at the
    // single-cell level
    match name {
        "figure1-plane" => Some(
            r#"{
  "cost": {"kind": "euclid_quadratic", "n": 2,
           "domain": {"box": [[-1.0, 1.0], [-1.0, 1.0]], "cut_margin": 0.0}},
  "seed": 7,
  "semidiscrete": {
    "grid": {"nx": 512, "ny": 512, "box": [[-1.0, 1.0], [-1.0, 1.0]]},
    "disk": {"center": [0.0, 0.0], "radius": 1.0},
    "geodesic_targets": {"center": [0.0, 0.0],
                         "dir": [0.9393727128473789, 0.3428978074554514],
                         "arclengths": [-0.6, 0.0, 0.6]},
    "eps": [0.3333333333333333, 0.3333333333333334, 0.3333333333333333]
  }
}"#,
        ),
        "figure1-sphere" => Some(
            r#"{
  "cost": {"kind": "sphere_squared", "n": 2},
  "seed": 7,
  "semidiscrete": {
    "grid": {"nx": 512, "ny": 512,
             "box": [[0.5207963267948966, 2.6207963267948966],
                     [1.6915926535897932, 4.591592653589793]]},
    "disk": {"center": [1.5707963267948966, 3.141592653589793], "radius": 1.0},
    "geodesic_targets": {"center": [1.5707963267948966, 3.141592653589793],
                         "dir": [0.3428978074554514, 0.9393727128473789],
                         "arclengths": [-0.6, 0.0, 0.6]},
    "eps": [0.3333333333333333, 0.3333333333333334, 0.3333333333333333]
  }
}"#,
        ),
        "figure1-hyperbolic" => Some(
            r#"{
  "cost": {"kind": "hyperbolic_squared", "n": 2,
           "domain": {"box": [[-0.9568, 0.9568], [-0.9568, 0.9568]], "cut_margin": 0.0}},
  "seed": 7,
  "semidiscrete": {
    "grid": {"nx": 512, "ny": 512, "box": [[-0.9568, 0.9568], [-0.9568, 0.9568]]},
    "disk": {"center": [0.0, 0.0], "radius": 3.6},
    "geodesic_targets": {"center": [0.0, 0.0],
                         "dir": [0.9393727128473789, 0.3428978074554514],
                         "arclengths": [-2.16, 0.0, 2.16]},
    "eps": [0.3333333333333333, 0.3333333333333334, 0.3333333333333333]
  }
}"#,
        ),
        "reflector-a3s" => Some(
            r#"{
  "cost": {"kind": "log_euclid", "n": 2,
           "domain": {"box": [[-1.0, 1.0], [-1.0, 1.0], [2.0, 4.0], [-1.0, 1.0]],
                      "cut_margin": 0.5}},
  "seed": 7,
  "curvature": {"points_per_side": 12, "directions_per_point": 8, "tolerance": 1e-9}
}"#,
        ),
        "sphere-diagonal-43" => Some(
            r#"{
  "cost": {"kind": "sphere_squared", "n": 2,
           "domain": {"box": [[0.9, 2.2415926535897933], [0.5, 5.7]], "cut_margin": 0.1}},
  "seed": 7,
  "curvature": {"points_per_side": 10, "directions_per_point": 8, "tolerance": 1e-9,
                "diagonal_scan": {"points": 20}}
}"#,
        ),
        _ => None,
    }
}
