//! Node-method parameters of a single pipe.
//!
//! Transit time t_d = rho_w * A * L / m splits into an integer step delay
//! gamma = floor(t_d / dt) and an interpolation weight alpha = 1 - frac,
//! so a transit time that is an exact multiple of dt gives a pure delay
//! (alpha = 1). The loss fraction follows the steady-state exponential
//! decay eta = 1 - exp(-lambda * L / (c_w * m)).

use super::{Constants, NetworkError, Pipe, PipeKernelParams};

pub fn pipe_kernel_params(
    pipe: &Pipe,
    constants: &Constants,
) -> Result<PipeKernelParams, NetworkError> {
    if pipe.mass_flow_kg_s <= 0.0 {
        return Err(NetworkError::ZeroMassFlow(pipe.id.clone()));
    }
    let transit_s = constants.rho_w * pipe.area_m2 * pipe.length_m / pipe.mass_flow_kg_s;
    let steps = transit_s / constants.dt_s;
    let gamma = steps.floor() as usize;
    let alpha = 1.0 - (steps - gamma as f64);
    let eta = 1.0
        - (-pipe.lambda_kw_per_m_c * pipe.length_m / (constants.c_w * pipe.mass_flow_kg_s)).exp();
    Ok(PipeKernelParams { gamma, alpha, eta })
}
