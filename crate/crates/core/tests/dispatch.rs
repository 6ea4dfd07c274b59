//! Dispatch integration: builder semantics, steady-state optimum against a
//! closed-form oracle, and node-method/AGM parity.

mod common;

use approx::assert_abs_diff_eq;
use common::load_fixture;
use dhn_core::agm::derive_agm;
use dhn_core::dispatch::{
    build_dispatch_agm, build_dispatch_node, compare_models, solve_dispatch, ChpParams,
    DispatchError, DispatchInputs, TemperatureBounds,
};
use dhn_core::network::trace_flow_fractions;
use std::collections::BTreeMap;

fn chain_inputs(horizon: usize) -> DispatchInputs {
    let mut demand_kw = BTreeMap::new();
    // Diurnal profiles within the deliverable range of both loads.
    demand_kw.insert(
        "L6".into(),
        (0..horizon)
            .map(|t| 5000.0 + 1500.0 * (t as f64 * std::f64::consts::TAU / 24.0).sin())
            .collect(),
    );
    demand_kw.insert(
        "L7".into(),
        (0..horizon)
            .map(|t| 3200.0 + 900.0 * (t as f64 * std::f64::consts::TAU / 24.0 + 1.0).cos())
            .collect(),
    );
    DispatchInputs {
        horizon,
        demand_kw,
        chp: vec![ChpParams {
            source: "S1".into(),
            cost_c2: 1e-5,
            cost_c1: 0.4,
            cost_c0: 50.0,
            power_per_heat: 0.5,
            heat_min_kw: 0.0,
            heat_max_kw: 60_000.0,
        }],
        bounds: TemperatureBounds {
            source_supply_c: (60.0, 130.0),
            load_supply_c: (50.0, 110.0),
            load_return_c: (35.0, 70.0),
        },
        warm_supply_c: 90.0,
        warm_return_c: 45.0,
    }
}

#[test]
fn shared_layouts_are_identical() {
    let network = load_fixture("dispatch_chain.json");
    let flows = trace_flow_fractions(&network).unwrap();
    let agm = derive_agm(&network, &flows).unwrap();
    let inputs = chain_inputs(24);

    let node = build_dispatch_node(&network, &inputs).unwrap();
    let agm_problem = build_dispatch_agm(&agm, &(&network).into(), &inputs).unwrap();

    assert_eq!(node.layout.shared_len(), agm_problem.layout.shared_len());
    assert_eq!(
        node.layout.src_supply(0, 5),
        agm_problem.layout.src_supply(0, 5)
    );
    assert_eq!(node.layout.heat(0, 23), agm_problem.layout.heat(0, 23));
    assert_eq!(agm_problem.layout.extra, 0);
    assert!(node.layout.extra > 0);
    assert!(node.qp.num_vars() > agm_problem.qp.num_vars());
}

#[test]
fn zero_demand_zero_offsets_cost_nothing() {
    let network = load_fixture("dispatch_chain.json");
    let mut inputs = chain_inputs(12);
    for series in inputs.demand_kw.values_mut() {
        series.fill(0.0);
    }
    inputs.chp[0].cost_c0 = 0.0;
    inputs.chp[0].cost_c1 = 0.0;
    // A lossless steady state needs ambient-temperature operation; with
    // losses, zero demand still permits zero heat when the bounds admit a
    // flat profile at the warm-start temperature only if eta = 0. Use a
    // relaxed bound set and warm start at equal supply/return instead.
    inputs.bounds = TemperatureBounds {
        source_supply_c: (5.0, 130.0),
        load_supply_c: (5.0, 110.0),
        load_return_c: (5.0, 70.0),
    };
    inputs.warm_supply_c = 5.0;
    inputs.warm_return_c = 5.0;

    let problem = build_dispatch_node(&network, &inputs).unwrap();
    let solution = solve_dispatch(&problem).unwrap();
    assert!(solution.objective.abs() < 1e-5, "cost {}", solution.objective);
    for series in solution.heat_kw.values() {
        for h in series {
            assert!(h.abs() < 1e-4);
        }
    }
}

#[test]
fn steady_state_matches_the_closed_form() {
    // Single pipe, constant demand, supply lower bound pinned at the steady
    // optimum so the horizon tail cannot dip: the solver must reproduce the
    // hand-computed constant schedule.
    let config: dhn_core::network::NetworkConfig = serde_json::from_str(
        r#"{
          "constants": {"rho_w": 1000.0, "c_w": 4.2, "dt_s": 100.0, "tau_amb_c": 0.0},
          "nodes": [
            {"id": "S1", "kind": "source", "mass_flow_kg_s": 100.0},
            {"id": "L1", "kind": "load", "mass_flow_kg_s": 100.0}
          ],
          "pipes": [
            {"id": "P1", "from": "S1", "to": "L1", "length_m": 100.0,
             "area_m2": 0.1, "lambda_kw_per_m_c": 0.4425809785606156,
             "mass_flow_kg_s": 100.0}
          ]
        }"#,
    )
    .unwrap();
    let network = dhn_core::network::build_network(&config).unwrap();
    let eta = network.kernel_params()[0].eta;

    let c_w = 4.2;
    let m = 100.0;
    let demand = 8400.0; // Delta = 20 degC
    let delta = demand / (c_w * m);
    let lb_return = 40.0;
    let supply_ss = (lb_return + delta) / (1.0 - eta);
    let return_ss = (1.0 - eta) * lb_return;
    let heat_ss = c_w * m * (supply_ss - return_ss);
    let (c2, c1, c0, ratio) = (1e-5, 0.5, 100.0, 0.5);
    let horizon = 24;
    let power_ss = ratio * heat_ss;
    let expected_cost = horizon as f64 * (c2 * power_ss * power_ss + c1 * power_ss + c0);

    let inputs = DispatchInputs {
        horizon,
        demand_kw: BTreeMap::from([("L1".to_string(), vec![demand; horizon])]),
        chp: vec![ChpParams {
            source: "S1".into(),
            cost_c2: c2,
            cost_c1: c1,
            cost_c0: c0,
            power_per_heat: ratio,
            heat_min_kw: 0.0,
            heat_max_kw: 1e5,
        }],
        bounds: TemperatureBounds {
            source_supply_c: (supply_ss, 120.0),
            load_supply_c: (45.0, 90.0),
            load_return_c: (lb_return, 70.0),
        },
        warm_supply_c: supply_ss,
        warm_return_c: lb_return,
    };
    let problem = build_dispatch_node(&network, &inputs).unwrap();
    let solution = solve_dispatch(&problem).unwrap();

    let rel = (solution.objective - expected_cost).abs() / expected_cost;
    assert!(
        rel <= 1e-6,
        "objective {} vs closed form {} (rel {rel:.3e})",
        solution.objective,
        expected_cost
    );
    for h in &solution.heat_kw["S1"] {
        assert_abs_diff_eq!(*h, heat_ss, epsilon = 1e-3 * heat_ss);
    }
}

#[test]
fn identical_models_have_zero_deviation() {
    let network = load_fixture("dispatch_chain.json");
    let flows = trace_flow_fractions(&network).unwrap();
    let agm = derive_agm(&network, &flows).unwrap();
    let comparison = compare_models(&network, &agm, &chain_inputs(24)).unwrap();
    assert!(
        comparison.deviation <= 1e-6,
        "deviation {} with exact model",
        comparison.deviation
    );
}

#[test]
fn truncated_model_stays_close() {
    let network = load_fixture("dispatch_chain.json");
    let flows = trace_flow_fractions(&network).unwrap();
    let agm = derive_agm(&network, &flows).unwrap().truncated(4);
    let inputs = chain_inputs(24);
    let comparison = compare_models(&network, &agm, &inputs).unwrap();

    assert!(
        comparison.deviation <= 0.01,
        "deviation {}",
        comparison.deviation
    );
    let peak = inputs
        .demand_kw
        .values()
        .flat_map(|s| s.iter().copied())
        .fold(0.0f64, f64::max);
    for (a, b) in comparison.heat_node_kw.iter().zip(&comparison.heat_agm_kw) {
        assert!(
            (a - b).abs() <= 0.02 * peak,
            "heat profiles differ by {} (2% of peak = {})",
            (a - b).abs(),
            0.02 * peak
        );
    }
}

#[test]
fn impossible_demand_is_caught_at_build_time() {
    let network = load_fixture("dispatch_chain.json");
    let mut inputs = chain_inputs(24);
    // L7 flow is 40 kg/s; bounds allow at most c_w*40*(110-35) = 12600 kW.
    inputs.demand_kw.insert("L7".into(), vec![20_000.0; 24]);
    match build_dispatch_node(&network, &inputs) {
        Err(DispatchError::InfeasibleBounds(_)) => {}
        other => panic!("expected InfeasibleBounds, got {other:?}"),
    }
}
