use dhn_core::dispatch::*;
use std::collections::BTreeMap;

fn main() {
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
    ).unwrap();
    let network = dhn_core::network::build_network(&config).unwrap();
    let eta = network.kernel_params()[0].eta;
    println!("gamma {} alpha {} eta {}", network.kernel_params()[0].gamma, network.kernel_params()[0].alpha, eta);

    let (c_w, m, demand) = (4.2, 100.0, 8400.0);
    let delta = demand / (c_w * m);
    let lb_return = 40.0;
    let supply_ss = (lb_return + delta) / (1.0 - eta);
    let return_ss = (1.0 - eta) * lb_return;
    let heat_ss = c_w * m * (supply_ss - return_ss);
    let horizon = 24;

    let inputs = DispatchInputs {
        horizon,
        demand_kw: BTreeMap::from([("L1".to_string(), vec![demand; horizon])]),
        chp: vec![ChpParams { source: "S1".into(), cost_c2: 1e-5, cost_c1: 0.5, cost_c0: 100.0,
            power_per_heat: 0.5, heat_min_kw: 0.0, heat_max_kw: 1e5 }],
        bounds: TemperatureBounds {
            source_supply_c: (supply_ss, 120.0),
            load_supply_c: (45.0, 90.0),
            load_return_c: (lb_return, 70.0),
        },
        warm_supply_c: supply_ss,
        warm_return_c: lb_return,
    };
    let problem = build_dispatch_node(&network, &inputs).unwrap();

    // check the constant schedule is feasible for the built QP:
    let layout = &problem.layout;
    let mut x = nalgebra::DVector::zeros(problem.qp.num_vars());
    let shared = layout.shared_len();
    let extra_per_step = (problem.qp.num_vars() - shared) / horizon;
    for t in 0..horizon {
        x[layout.src_supply(0, t)] = supply_ss;
        x[layout.load_supply(0, t)] = lb_return + delta;
        x[layout.load_return(0, t)] = lb_return;
        x[layout.src_return(0, t)] = return_ss;
        x[layout.heat(0, t)] = heat_ss;
        x[layout.power(0, t)] = 0.5 * heat_ss;
        // extras: pipe_out_s, pipe_out_r
        x[shared + t * extra_per_step] = (1.0 - eta) * supply_ss;      // supply pipe outlet
        x[shared + t * extra_per_step + 1] = (1.0 - eta) * lb_return;  // return pipe outlet
    }
    let resid = (&problem.qp.a * &x - &problem.qp.b).abs().max();
    println!("constant schedule residual: {resid:.3e}");
    println!("constant schedule objective: {}", problem.qp.objective(&x));

    let sol = solve_dispatch(&problem).unwrap();
    println!("solver objective {} polished {} feas {:.2e}", sol.objective, sol.polished, sol.feasibility_residual);
    println!("supply: {:?}", &sol.source_supply_c["S1"][..6]);
    println!("return: {:?}", &sol.load_return_c["L1"][..6]);
    println!("heat:   {:?}", &sol.heat_kw["S1"][..6]);
    println!("heat_ss = {heat_ss}");
    let tail = horizon - 4;
    println!("supply tail: {:?}", &sol.source_supply_c["S1"][tail..]);
    println!("heat tail:   {:?}", &sol.heat_kw["S1"][tail..]);
}
