#![allow(dead_code)]

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gasflex::network::{
    load_system, validate_system, ElectricLoad, GasCoupling, GasLoad, GasNetwork, GasNode,
    GasSupplier, Generator, IntegratedSystem, Line, Pipeline, PowerNetwork, PowerNode, WindFarm,
};

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

pub fn shipped(name: &str) -> IntegratedSystem {
    let text = std::fs::read_to_string(data_path(name)).expect("shipped data file");
    let sys = load_system(&text).expect("shipped data parses");
    assert!(validate_system(&sys).is_empty(), "{name} is invalid");
    sys
}

/// Size limits of [`random_system`].
#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub gas_nodes: usize,
    pub pipelines: usize,
    pub hours: usize,
}

pub const TOY: Shape = Shape {
    gas_nodes: 5,
    pipelines: 6,
    hours: 6,
};

/// Lies in every random pressure box.
const COMMON_PRESSURE: f64 = 40.0;

/// A random connected system within `shape`.
///
/// Every gas node has an expensive local supplier and the coal unit covers
/// the whole electric load. Initial linepack matches `COMMON_PRESSURE`
/// at both ends, so all pressures there with every pipeline idle is always a
/// feasible point.
pub fn random_system(seed: u64, shape: Shape) -> IntegratedSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hours = rng.random_range(2..=shape.hours);
    let ng = rng.random_range(2..=shape.gas_nodes);

    let nodes: Vec<GasNode> = (0..ng)
        .map(|m| {
            let lo = rng.random_range(20.0..40.0_f64).round();
            let hi = lo + rng.random_range(20.0..40.0_f64).round();
            GasNode {
                id: format!("m{m}"),
                pressure_min: lo,
                pressure_max: hi,
            }
        })
        .collect();

    let mut edges: Vec<(usize, usize)> = Vec::new();
    for m in 1..ng {
        let other = rng.random_range(0..m);
        edges.push(if rng.random_bool(0.5) {
            (m, other)
        } else {
            (other, m)
        });
    }
    let max_pipes = shape.pipelines.min(ng * (ng - 1) / 2);
    let target = rng.random_range(ng - 1..=max_pipes);
    for _ in 0..50 {
        if edges.len() >= target {
            break;
        }
        let a = rng.random_range(0..ng);
        let b = rng.random_range(0..ng);
        if a != b
            && !edges
                .iter()
                .any(|&(x, y)| (x, y) == (a, b) || (x, y) == (b, a))
        {
            edges.push((a, b));
        }
    }
    let pipelines: Vec<Pipeline> = edges
        .iter()
        .enumerate()
        .map(|(z, &(a, b))| {
            let linepack = rng.random_range(0.5..2.0_f64);
            Pipeline {
                id: format!("z{z}"),
                from: a,
                to: b,
                weymouth: rng.random_range(0.5..3.0),
                linepack,
                initial_linepack: linepack * COMMON_PRESSURE,
                compression: 1.0,
            }
        })
        .collect();

    let mut suppliers = vec![GasSupplier {
        id: "cheap".into(),
        node: rng.random_range(0..ng),
        capacity: 300.0,
        cost: rng.random_range(5.0..15.0),
    }];
    let mut loads = Vec::new();
    for m in 0..ng {
        if rng.random_bool(0.6) {
            loads.push(GasLoad {
                id: format!("gd{m}"),
                node: m,
                demand: (0..hours)
                    .map(|_| rng.random_range(0.0..40.0_f64).round())
                    .collect(),
            });
        }
        suppliers.push(GasSupplier {
            id: format!("local{m}"),
            node: m,
            capacity: 300.0,
            cost: rng.random_range(30.0..60.0),
        });
    }

    let np = rng.random_range(1..=3);
    let power_nodes = (0..np)
        .map(|n| PowerNode {
            id: format!("n{n}"),
            reference: n == 0,
        })
        .collect();
    let lines = (1..np)
        .map(|n| Line {
            id: format!("l{n}"),
            from: rng.random_range(0..n),
            to: n,
            // Stiff enough that the whole load fits within the angle limits.
            susceptance: rng.random_range(100.0..200.0),
            capacity: 1000.0,
        })
        .collect();
    let gfpp_gas_node = rng.random_range(0..ng);
    let mut generators = vec![Generator {
        id: "coal".into(),
        node: 0,
        capacity: 1000.0,
        cost: rng.random_range(40.0..80.0),
        gas: None,
    }];
    generators.push(Generator {
        id: "ccgt".into(),
        node: rng.random_range(0..np),
        capacity: rng.random_range(20.0..80.0),
        cost: 0.0,
        gas: Some(GasCoupling {
            node: gfpp_gas_node,
            conversion: rng.random_range(1.5..3.0),
        }),
    });
    let wind = vec![WindFarm {
        id: "w".into(),
        node: rng.random_range(0..np),
        forecast: (0..hours)
            .map(|_| rng.random_range(0.0..20.0_f64).round())
            .collect(),
    }];
    let eloads = (0..np)
        .map(|n| ElectricLoad {
            id: format!("d{n}"),
            node: n,
            demand: (0..hours)
                .map(|_| rng.random_range(10.0..60.0_f64).round())
                .collect(),
        })
        .collect();

    let sys = IntegratedSystem::new(
        format!("random-{seed}"),
        hours,
        PowerNetwork {
            nodes: power_nodes,
            lines,
            generators,
            wind,
            loads: eloads,
        },
        GasNetwork {
            nodes,
            pipelines,
            suppliers,
            loads,
        },
    );
    let violations = validate_system(&sys);
    assert!(violations.is_empty(), "seed {seed}: {violations:?}");
    sys
}

pub fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}
