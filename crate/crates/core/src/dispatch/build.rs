//! Dispatch problem assembly.
//!
//! Both builders share one variable layout for the quantities they have in
//! common — source supply, load supply, load return, source return, CHP
//! heat and power, time-major — so a node-method build and an AGM build of
//! the same instance expose identical indices for identical quantities.
//! Model-specific variables (pipe outlets, interior node temperatures)
//! live in a trailing block.

use super::qp::QpProblem;
use super::{ChpParams, DhnModelKind, DispatchError, DispatchInputs, DispatchProblem, SiteParams};
use crate::agm::AgmModel;
use crate::network::{NetworkModel, NodeKind};
use nalgebra::{DMatrix, DVector};

/// Time-major variable layout. Shared block width is
/// `4 * n_sources + 2 * n_loads` per step.
#[derive(Debug, Clone)]
pub struct Layout {
    pub horizon: usize,
    pub sources: Vec<String>,
    pub loads: Vec<String>,
    /// Extra (model-specific) variables appended after the shared block.
    pub extra: usize,
}

impl Layout {
    pub fn n_sources(&self) -> usize {
        self.sources.len()
    }

    pub fn n_loads(&self) -> usize {
        self.loads.len()
    }

    pub fn shared_width(&self) -> usize {
        4 * self.n_sources() + 2 * self.n_loads()
    }

    pub fn shared_len(&self) -> usize {
        self.horizon * self.shared_width()
    }

    pub fn num_vars(&self) -> usize {
        self.shared_len() + self.extra
    }

    pub fn src_supply(&self, k: usize, t: usize) -> usize {
        t * self.shared_width() + k
    }

    pub fn load_supply(&self, v: usize, t: usize) -> usize {
        t * self.shared_width() + self.n_sources() + v
    }

    pub fn load_return(&self, v: usize, t: usize) -> usize {
        t * self.shared_width() + self.n_sources() + self.n_loads() + v
    }

    pub fn src_return(&self, k: usize, t: usize) -> usize {
        t * self.shared_width() + self.n_sources() + 2 * self.n_loads() + k
    }

    pub fn heat(&self, k: usize, t: usize) -> usize {
        t * self.shared_width() + 2 * self.n_sources() + 2 * self.n_loads() + k
    }

    pub fn power(&self, k: usize, t: usize) -> usize {
        t * self.shared_width() + 3 * self.n_sources() + 2 * self.n_loads() + k
    }
}

/// Sparse accumulation of equality rows before densifying into the QP.
struct Assembler {
    layout: Layout,
    rows: Vec<(Vec<(usize, f64)>, f64)>,
    lb: Vec<f64>,
    ub: Vec<f64>,
    q_diag: Vec<f64>,
    q_lin: Vec<f64>,
    objective_constant: f64,
}

impl Assembler {
    fn new(layout: Layout) -> Self {
        let n = layout.num_vars();
        Self {
            layout,
            rows: Vec::new(),
            lb: vec![f64::NEG_INFINITY; n],
            ub: vec![f64::INFINITY; n],
            q_diag: vec![0.0; n],
            q_lin: vec![0.0; n],
            objective_constant: 0.0,
        }
    }

    fn equality(&mut self, terms: Vec<(usize, f64)>, rhs: f64) {
        self.rows.push((terms, rhs));
    }

    fn bound(&mut self, var: usize, lo: f64, hi: f64) {
        self.lb[var] = lo;
        self.ub[var] = hi;
    }

    fn finish(self, kind: DhnModelKind, chp: Vec<ChpParams>) -> DispatchProblem {
        let n = self.layout.num_vars();
        let m = self.rows.len();
        let mut a = DMatrix::<f64>::zeros(m, n);
        let mut b = DVector::<f64>::zeros(m);
        for (i, (terms, rhs)) in self.rows.into_iter().enumerate() {
            for (j, coef) in terms {
                a[(i, j)] += coef;
            }
            b[i] = rhs;
        }
        DispatchProblem {
            kind,
            qp: QpProblem {
                q_diag: DVector::from_vec(self.q_diag),
                q_lin: DVector::from_vec(self.q_lin),
                a,
                b,
                lb: DVector::from_vec(self.lb),
                ub: DVector::from_vec(self.ub),
                objective_constant: self.objective_constant,
            },
            layout: self.layout,
            chp,
        }
    }
}

/// Validates the shared inputs and returns CHP parameters in source order
/// plus the per-load demand matrix.
fn prepare_shared(
    sources: &[(String, f64)],
    loads: &[(String, f64)],
    c_w: f64,
    inputs: &DispatchInputs,
) -> Result<(Vec<ChpParams>, Vec<Vec<f64>>), DispatchError> {
    if inputs.horizon == 0 {
        return Err(DispatchError::InvalidParameter("horizon must be positive".into()));
    }
    let b = &inputs.bounds;
    for (name, (lo, hi)) in [
        ("source_supply", b.source_supply_c),
        ("load_supply", b.load_supply_c),
        ("load_return", b.load_return_c),
    ] {
        if lo > hi {
            return Err(DispatchError::InvalidParameter(format!(
                "{name} bounds are inverted ({lo} > {hi})"
            )));
        }
    }

    let mut chp_ordered = Vec::with_capacity(sources.len());
    for (source, _) in sources {
        let params = inputs
            .chp
            .iter()
            .find(|c| &c.source == source)
            .ok_or_else(|| DispatchError::MissingChp(source.clone()))?;
        if params.cost_c2 < 0.0 {
            return Err(DispatchError::InvalidParameter(format!(
                "CHP at `{source}` has negative quadratic cost"
            )));
        }
        if params.heat_min_kw > params.heat_max_kw {
            return Err(DispatchError::InvalidParameter(format!(
                "CHP at `{source}` has inverted heat limits"
            )));
        }
        chp_ordered.push(params.clone());
    }

    let mut demand = Vec::with_capacity(loads.len());
    for (load, flow) in loads {
        let series = inputs
            .demand_kw
            .get(load)
            .ok_or_else(|| DispatchError::MissingDemand(load.clone()))?;
        if series.len() < inputs.horizon {
            return Err(DispatchError::DemandLength {
                load: load.clone(),
                needed: inputs.horizon,
                available: series.len(),
            });
        }
        // Steady-state deliverability: the largest temperature spread the
        // bounds allow caps the extractable heat.
        let max_heat = c_w * flow * (b.load_supply_c.1 - b.load_return_c.0);
        for (t, d) in series[..inputs.horizon].iter().enumerate() {
            if *d < 0.0 {
                return Err(DispatchError::InvalidParameter(format!(
                    "demand for `{load}` is negative at step {t}"
                )));
            }
            if *d > max_heat {
                return Err(DispatchError::InfeasibleBounds(format!(
                    "load `{load}` demands {d:.1} kW at step {t}, bounds allow {max_heat:.1} kW"
                )));
            }
        }
        demand.push(series[..inputs.horizon].to_vec());
    }
    Ok((chp_ordered, demand))
}

/// Adds the model-independent constraints: temperature bounds, load heat
/// balance, CHP heat definition and power coupling, and the fuel cost.
fn add_shared(
    asm: &mut Assembler,
    sources: &[(String, f64)],
    loads: &[(String, f64)],
    c_w: f64,
    inputs: &DispatchInputs,
    chp: &[ChpParams],
    demand: &[Vec<f64>],
) {
    let layout = asm.layout.clone();
    let b = &inputs.bounds;
    for t in 0..layout.horizon {
        for (k, (_, flow)) in sources.iter().enumerate() {
            asm.bound(
                layout.src_supply(k, t),
                b.source_supply_c.0,
                b.source_supply_c.1,
            );
            asm.bound(layout.heat(k, t), chp[k].heat_min_kw, chp[k].heat_max_kw);

            // heat = c_w * m_src * (src_supply - src_return)
            asm.equality(
                vec![
                    (layout.heat(k, t), 1.0),
                    (layout.src_supply(k, t), -c_w * flow),
                    (layout.src_return(k, t), c_w * flow),
                ],
                0.0,
            );
            // power = ratio * heat
            asm.equality(
                vec![
                    (layout.power(k, t), 1.0),
                    (layout.heat(k, t), -chp[k].power_per_heat),
                ],
                0.0,
            );
            asm.q_diag[layout.power(k, t)] = 2.0 * chp[k].cost_c2;
            asm.q_lin[layout.power(k, t)] = chp[k].cost_c1;
            asm.objective_constant += chp[k].cost_c0;
        }
        for (v, (_, flow)) in loads.iter().enumerate() {
            asm.bound(
                layout.load_supply(v, t),
                b.load_supply_c.0,
                b.load_supply_c.1,
            );
            asm.bound(
                layout.load_return(v, t),
                b.load_return_c.0,
                b.load_return_c.1,
            );
            // c_w * m_l * (load_supply - load_return) = demand
            asm.equality(
                vec![
                    (layout.load_supply(v, t), c_w * flow),
                    (layout.load_return(v, t), -c_w * flow),
                ],
                demand[v][t],
            );
        }
    }
}

/// Per-node steady temperatures when every boundary injection sits at
/// `boundary_c` forever: the pre-horizon state both model builds share.
fn steady_node_temps(network: &NetworkModel, boundary_c: f64, reversed: bool) -> Vec<f64> {
    let tau_amb = network.constants().tau_amb_c;
    let n_nodes = network.nodes().len();
    let mut order: Vec<usize> = network.topo().to_vec();
    if reversed {
        order.reverse();
    }
    let mut temps = vec![boundary_c; n_nodes];
    for &n in &order {
        let inflows = if reversed {
            &network.supply_out()[n]
        } else {
            &network.supply_in()[n]
        };
        let injection = match (reversed, network.nodes()[n].kind) {
            (false, NodeKind::Source) | (true, NodeKind::Load) => {
                network.nodes()[n].mass_flow_kg_s.unwrap_or(0.0)
            }
            _ => 0.0,
        };
        let mut total = injection;
        let mut mix = injection * boundary_c;
        for &p in inflows {
            let pipe = &network.pipes()[p];
            let k = &network.kernel_params()[p];
            let upstream = if reversed { pipe.to } else { pipe.from };
            let outlet = (1.0 - k.eta) * temps[upstream] + k.eta * tau_amb;
            total += pipe.mass_flow_kg_s;
            mix += pipe.mass_flow_kg_s * outlet;
        }
        if total > 0.0 {
            temps[n] = mix / total;
        }
    }
    temps
}

/// Builds the dispatch QP against the exact node-method dynamics.
pub fn build_dispatch_node(
    network: &NetworkModel,
    inputs: &DispatchInputs,
) -> Result<DispatchProblem, DispatchError> {
    let site = SiteParams::from(network);
    let (chp, demand) = prepare_shared(&site.source_flows, &site.load_flows, site.c_w, inputs)?;

    // Pre-horizon history: the network held at the warm boundary
    // temperatures long enough to settle, which is also what the aggregate
    // build implies when its lags reach before the horizon.
    let steady_supply = steady_node_temps(network, inputs.warm_supply_c, false);
    let steady_return = steady_node_temps(network, inputs.warm_return_c, true);

    let horizon = inputs.horizon;
    let n_pipes = network.pipes().len();
    let n_nodes = network.nodes().len();

    // Classify each node's variable on each side: shared decision vars
    // where possible, extra interior variables otherwise.
    let source_pos: std::collections::BTreeMap<usize, usize> = network
        .sources()
        .iter()
        .enumerate()
        .map(|(k, &n)| (n, k))
        .collect();
    let load_pos: std::collections::BTreeMap<usize, usize> = network
        .loads()
        .iter()
        .enumerate()
        .map(|(v, &n)| (n, v))
        .collect();

    // Supply side: a source without pipe inflows injects directly, so its
    // node temperature is the decision variable itself.
    let mut supply_extra = Vec::new(); // node -> extra slot
    let mut supply_needs_mixing = vec![false; n_nodes];
    for n in 0..n_nodes {
        let kind = network.nodes()[n].kind;
        let has_inflow = !network.supply_in()[n].is_empty();
        match kind {
            NodeKind::Source if !has_inflow => {}
            NodeKind::Load | NodeKind::Source => supply_needs_mixing[n] = true,
            NodeKind::Junction => {
                supply_needs_mixing[n] = true;
                supply_extra.push(n);
            }
        }
        if kind == NodeKind::Source && has_inflow {
            supply_extra.push(n);
        }
    }
    // Return side: inflows are the reversed supply outflows; loads without
    // them are pure injectors.
    let mut return_extra = Vec::new();
    let mut return_needs_mixing = vec![false; n_nodes];
    for n in 0..n_nodes {
        let kind = network.nodes()[n].kind;
        let has_inflow = !network.supply_out()[n].is_empty();
        match kind {
            NodeKind::Load if !has_inflow => {}
            NodeKind::Source | NodeKind::Load => return_needs_mixing[n] = true,
            NodeKind::Junction => {
                return_needs_mixing[n] = true;
                return_extra.push(n);
            }
        }
        if kind == NodeKind::Load && has_inflow {
            return_extra.push(n);
        }
    }

    let extra_per_step = 2 * n_pipes + supply_extra.len() + return_extra.len();
    let layout = Layout {
        horizon,
        sources: site.source_flows.iter().map(|(s, _)| s.clone()).collect(),
        loads: site.load_flows.iter().map(|(l, _)| l.clone()).collect(),
        extra: horizon * extra_per_step,
    };
    let shared_len = layout.shared_len();
    let pipe_out_s = move |j: usize, t: usize| shared_len + t * extra_per_step + j;
    let pipe_out_r = move |j: usize, t: usize| shared_len + t * extra_per_step + n_pipes + j;
    let supply_slot: std::collections::BTreeMap<usize, usize> = supply_extra
        .iter()
        .enumerate()
        .map(|(i, &n)| (n, 2 * n_pipes + i))
        .collect();
    let return_slot: std::collections::BTreeMap<usize, usize> = return_extra
        .iter()
        .enumerate()
        .map(|(i, &n)| (n, 2 * n_pipes + supply_extra.len() + i))
        .collect();

    let mut asm = Assembler::new(layout);
    add_shared(
        &mut asm,
        &site.source_flows,
        &site.load_flows,
        site.c_w,
        inputs,
        &chp,
        &demand,
    );
    let layout = asm.layout.clone();

    // Node temperature variable on each side, per step.
    let supply_var = |n: usize, t: usize| -> usize {
        if let Some(slot) = supply_slot.get(&n) {
            shared_len + t * extra_per_step + slot
        } else if let Some(&k) = source_pos.get(&n) {
            layout.src_supply(k, t)
        } else {
            let v = load_pos[&n];
            layout.load_supply(v, t)
        }
    };
    let return_var = |n: usize, t: usize| -> usize {
        if let Some(slot) = return_slot.get(&n) {
            shared_len + t * extra_per_step + slot
        } else if let Some(&k) = source_pos.get(&n) {
            layout.src_return(k, t)
        } else {
            let v = load_pos[&n];
            layout.load_return(v, t)
        }
    };

    let tau_amb = site.tau_amb_c;
    for t in 0..horizon {
        // Pipe outlets, both orientations.
        for (j, pipe) in network.pipes().iter().enumerate() {
            let k = &network.kernel_params()[j];
            for (reversed, out_var) in [(false, pipe_out_s(j, t)), (true, pipe_out_r(j, t))] {
                let inlet_node = if reversed { pipe.to } else { pipe.from };
                let warm = if reversed {
                    steady_return[inlet_node]
                } else {
                    steady_supply[inlet_node]
                };
                let mut terms = vec![(out_var, 1.0)];
                let mut rhs = k.eta * tau_amb;
                let taps = [
                    ((1.0 - k.eta) * k.alpha, t as isize - k.gamma as isize),
                    (
                        (1.0 - k.eta) * (1.0 - k.alpha),
                        t as isize - k.gamma as isize - 1,
                    ),
                ];
                for (coef, step) in taps {
                    if coef == 0.0 {
                        continue;
                    }
                    if step < 0 {
                        rhs += coef * warm;
                    } else {
                        let var = if reversed {
                            return_var(inlet_node, step as usize)
                        } else {
                            supply_var(inlet_node, step as usize)
                        };
                        terms.push((var, -coef));
                    }
                }
                asm.equality(terms, rhs);
            }
        }

        // Node mixing, supply side.
        for n in 0..n_nodes {
            if !supply_needs_mixing[n] {
                continue;
            }
            let inflow: f64 = network.supply_in()[n]
                .iter()
                .map(|&p| network.pipes()[p].mass_flow_kg_s)
                .sum();
            let injection = match network.nodes()[n].kind {
                NodeKind::Source => network.nodes()[n].mass_flow_kg_s.unwrap_or(0.0),
                _ => 0.0,
            };
            let total = inflow + injection;
            let mut terms = vec![(supply_var(n, t), 1.0)];
            for &p in &network.supply_in()[n] {
                terms.push((
                    pipe_out_s(p, t),
                    -network.pipes()[p].mass_flow_kg_s / total,
                ));
            }
            if injection > 0.0 {
                let k = source_pos[&n];
                terms.push((layout.src_supply(k, t), -injection / total));
            }
            asm.equality(terms, 0.0);
        }

        // Node mixing, return side.
        for n in 0..n_nodes {
            if !return_needs_mixing[n] {
                continue;
            }
            let inflow: f64 = network.supply_out()[n]
                .iter()
                .map(|&p| network.pipes()[p].mass_flow_kg_s)
                .sum();
            let injection = match network.nodes()[n].kind {
                NodeKind::Load => network.nodes()[n].mass_flow_kg_s.unwrap_or(0.0),
                _ => 0.0,
            };
            let total = inflow + injection;
            let mut terms = vec![(return_var(n, t), 1.0)];
            for &p in &network.supply_out()[n] {
                terms.push((
                    pipe_out_r(p, t),
                    -network.pipes()[p].mass_flow_kg_s / total,
                ));
            }
            if injection > 0.0 {
                let v = load_pos[&n];
                terms.push((layout.load_return(v, t), -injection / total));
            }
            asm.equality(terms, 0.0);
        }
    }

    Ok(asm.finish(DhnModelKind::NodeMethod, chp))
}

/// Builds the dispatch QP against the aggregate model's affine maps.
pub fn build_dispatch_agm(
    agm: &AgmModel,
    site: &SiteParams,
    inputs: &DispatchInputs,
) -> Result<DispatchProblem, DispatchError> {
    for ((name, _), model_name) in site.source_flows.iter().zip(agm.sources()) {
        if name != model_name {
            return Err(DispatchError::InvalidParameter(format!(
                "source order mismatch: site `{name}` vs model `{model_name}`"
            )));
        }
    }
    for ((name, _), model_name) in site.load_flows.iter().zip(agm.loads()) {
        if name != model_name {
            return Err(DispatchError::InvalidParameter(format!(
                "load order mismatch: site `{name}` vs model `{model_name}`"
            )));
        }
    }

    let (chp, demand) = prepare_shared(&site.source_flows, &site.load_flows, site.c_w, inputs)?;
    let layout = Layout {
        horizon: inputs.horizon,
        sources: agm.sources().to_vec(),
        loads: agm.loads().to_vec(),
        extra: 0,
    };
    let mut asm = Assembler::new(layout);
    add_shared(
        &mut asm,
        &site.source_flows,
        &site.load_flows,
        site.c_w,
        inputs,
        &chp,
        &demand,
    );
    let layout = asm.layout.clone();

    let tau_amb = site.tau_amb_c;
    for t in 0..inputs.horizon {
        // STM rows: load_supply = sum of banded source-supply history.
        for (v, entity) in agm.stm().iter().enumerate() {
            let mut terms = vec![(layout.load_supply(v, t), 1.0)];
            let mut rhs = entity.offset * tau_amb;
            for (k, band) in entity.bands.iter().enumerate() {
                for (i, coef) in band.coeffs.iter().enumerate() {
                    if *coef == 0.0 {
                        continue;
                    }
                    let step = t as isize - (band.delay + i) as isize;
                    if step < 0 {
                        rhs += coef * inputs.warm_supply_c;
                    } else {
                        terms.push((layout.src_supply(k, step as usize), -coef));
                    }
                }
            }
            asm.equality(terms, rhs);
        }
        // RTM rows: src_return = sum of banded load-return history.
        for (k, entity) in agm.rtm().iter().enumerate() {
            let mut terms = vec![(layout.src_return(k, t), 1.0)];
            let mut rhs = entity.offset * tau_amb;
            for (v, band) in entity.bands.iter().enumerate() {
                for (i, coef) in band.coeffs.iter().enumerate() {
                    if *coef == 0.0 {
                        continue;
                    }
                    let step = t as isize - (band.delay + i) as isize;
                    if step < 0 {
                        rhs += coef * inputs.warm_return_c;
                    } else {
                        terms.push((layout.load_return(v, step as usize), -coef));
                    }
                }
            }
            asm.equality(terms, rhs);
        }
    }

    Ok(asm.finish(DhnModelKind::Agm, chp))
}
