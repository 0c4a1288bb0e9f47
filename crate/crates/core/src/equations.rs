//! Coupled-mode equation table shared by the frequency-domain solvers and the
//! time-domain integrator.
//!
//! Every system is written as
//!
//! ```text
//! da/dt = G a + sum_p B_p in_p
//! out_q = sum_p P_qp in_p + C_q . a
//! ```
//!
//! in the frame rotating at the drive frequency, with the quantum sign
//! convention (time dependence `e^{-i omega t}`). Port 1 inputs are `r_in`
//! (hanger) or `b_1,in` (necklace and bridge); port 1 outputs are `l_out` or
//! `b_1,out`. The steady state solves `(-G) a = B_p`.

use crate::model::{Boundary, Coupling, HangerChain, NecklaceChain, SMatrix, SingleResonator};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Port {
    One,
    Two,
}

impl Port {
    pub const BOTH: [Port; 2] = [Port::One, Port::Two];

    pub fn index(self) -> usize {
        match self {
            Port::One => 0,
            Port::Two => 1,
        }
    }
}

pub trait CoupledModeEquations {
    fn dim(&self) -> usize;
    /// Entry `G[row, col]` of the drift generator.
    fn drift(&self, row: usize, col: usize) -> C64;
    /// Entry `B_port[site]`: how a unit input at `port` drives `site`.
    fn input(&self, port: Port, site: usize) -> C64;
    /// Entry `C_port[site]`: contribution of `site` to the output at `port`.
    fn output(&self, port: Port, site: usize) -> C64;
    /// Direct input-to-output transfer `P[out][inp]`.
    fn passthrough(&self, out: Port, inp: Port) -> C64;
    /// Whether the drift couples only nearest neighbours.
    fn is_tridiagonal(&self) -> bool {
        false
    }

    fn input_vector(&self, port: Port) -> Vec<C64> {
        (0..self.dim()).map(|j| self.input(port, j)).collect()
    }

    fn output_vector(&self, port: Port) -> Vec<C64> {
        (0..self.dim()).map(|j| self.output(port, j)).collect()
    }

    /// Assembles the S-matrix from steady amplitudes `a[p]` driven by unit input at port `p`.
    fn scattering(&self, steady: [&[C64]; 2]) -> SMatrix {
        let s = |out: Port, inp: Port| {
            let a = steady[inp.index()];
            self.passthrough(out, inp) + a.iter().enumerate().map(|(j, aj)| self.output(out, j) * aj).sum::<C64>()
        };
        SMatrix::new(s(Port::One, Port::One), s(Port::Two, Port::One), s(Port::One, Port::Two), s(Port::Two, Port::Two))
    }
}

fn i() -> C64 {
    C64::new(0.0, 1.0)
}

/// One resonator of any geometry at detuning `delta`.
#[derive(Debug, Clone, Copy)]
pub struct SingleEquations {
    pub delta: f64,
    pub gamma_a: f64,
    pub coupling: Coupling,
}

impl SingleEquations {
    pub fn new(res: &SingleResonator, omega_d: f64) -> Self {
        Self { delta: res.omega0 - omega_d, gamma_a: res.gamma_a, coupling: res.coupling }
    }
}

impl CoupledModeEquations for SingleEquations {
    fn dim(&self) -> usize {
        1
    }

    fn drift(&self, _: usize, _: usize) -> C64 {
        let external = match self.coupling {
            Coupling::Hanger { gamma } => gamma,
            Coupling::Necklace { gamma1, gamma2 } | Coupling::Bridge { gamma1, gamma2 } => (gamma1 + gamma2) / 2.0,
        };
        -(i() * self.delta + external + self.gamma_a / 2.0)
    }

    fn input(&self, port: Port, _: usize) -> C64 {
        C64::from(match (self.coupling, port) {
            (Coupling::Hanger { gamma }, _) => -gamma.sqrt(),
            (Coupling::Necklace { gamma1, .. } | Coupling::Bridge { gamma1, .. }, Port::One) => -gamma1.sqrt(),
            (Coupling::Necklace { gamma2, .. }, Port::Two) => gamma2.sqrt(),
            (Coupling::Bridge { gamma2, .. }, Port::Two) => -gamma2.sqrt(),
        })
    }

    fn output(&self, port: Port, _: usize) -> C64 {
        C64::from(match (self.coupling, port) {
            (Coupling::Hanger { gamma }, _) => gamma.sqrt(),
            (Coupling::Necklace { gamma1, .. } | Coupling::Bridge { gamma1, .. }, Port::One) => gamma1.sqrt(),
            (Coupling::Necklace { gamma2, .. }, Port::Two) => -gamma2.sqrt(),
            (Coupling::Bridge { gamma2, .. }, Port::Two) => gamma2.sqrt(),
        })
    }

    fn passthrough(&self, out: Port, inp: Port) -> C64 {
        // A hanger passes the line through to the opposite side; the necklace
        // and bridge reflect promptly off their coupling capacitors.
        let through = match self.coupling {
            Coupling::Hanger { .. } => out != inp,
            _ => out == inp,
        };
        C64::from(if through { 1.0 } else { 0.0 })
    }
}

/// Side-coupled chain with inter-site propagation phase `theta`. Site `j`
/// (zero based) sees `r_in` with phase `e^{i j theta}` and `l_in` with
/// `e^{i (N-1-j) theta}`.
#[derive(Debug, Clone)]
pub struct HangerChainEquations {
    pub delta: Vec<f64>,
    pub root_gamma: Vec<f64>,
    pub gamma_a: Vec<f64>,
    pub theta: f64,
}

impl HangerChainEquations {
    pub fn new(chain: &HangerChain, omega_d: f64) -> Self {
        Self::from_parts(chain.detunings(omega_d), chain.gamma(), chain.gamma_a().to_vec(), chain.theta())
    }

    pub fn from_parts(delta: Vec<f64>, gamma: &[f64], gamma_a: Vec<f64>, theta: f64) -> Self {
        Self { delta, root_gamma: gamma.iter().map(|g| g.sqrt()).collect(), gamma_a, theta }
    }

    fn phase(&self, steps: usize) -> C64 {
        C64::from_polar(1.0, steps as f64 * self.theta)
    }

    fn far_steps(&self, site: usize) -> usize {
        self.dim() - 1 - site
    }
}

impl CoupledModeEquations for HangerChainEquations {
    fn dim(&self) -> usize {
        self.delta.len()
    }

    fn drift(&self, row: usize, col: usize) -> C64 {
        let exchange = self.root_gamma[row] * self.root_gamma[col] * self.phase(row.abs_diff(col));
        if row == col {
            -(i() * self.delta[row] + self.gamma_a[row] / 2.0 + exchange)
        } else {
            -exchange
        }
    }

    fn input(&self, port: Port, site: usize) -> C64 {
        let steps = match port {
            Port::One => site,
            Port::Two => self.far_steps(site),
        };
        -self.root_gamma[site] * self.phase(steps)
    }

    fn output(&self, port: Port, site: usize) -> C64 {
        let steps = match port {
            Port::One => site,
            Port::Two => self.far_steps(site),
        };
        self.root_gamma[site] * self.phase(steps)
    }

    fn passthrough(&self, out: Port, inp: Port) -> C64 {
        if out == inp {
            C64::from(0.0)
        } else {
            self.phase(self.dim() - 1)
        }
    }
}

/// Hard-wall necklace chain: site 0 couples to port 1, site N-1 to port 2,
/// neighbours exchange with hopping `g_j`.
#[derive(Debug, Clone)]
pub struct NecklaceChainEquations {
    pub delta: Vec<f64>,
    pub g: Vec<f64>,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma_a: Vec<f64>,
}

impl NecklaceChainEquations {
    /// Site-basis equations exist only for the open chain.
    pub fn new(chain: &NecklaceChain, omega_d: f64) -> Option<Self> {
        (chain.boundary() == Boundary::HardWall).then(|| Self {
            delta: chain.detunings(omega_d),
            g: chain.g().to_vec(),
            gamma1: chain.gamma1(),
            gamma2: chain.gamma2(),
            gamma_a: chain.gamma_a().to_vec(),
        })
    }
}

impl CoupledModeEquations for NecklaceChainEquations {
    fn dim(&self) -> usize {
        self.delta.len()
    }

    fn drift(&self, row: usize, col: usize) -> C64 {
        let last = self.dim() - 1;
        if row == col {
            let mut damping = self.gamma_a[row] / 2.0;
            if row == 0 {
                damping += self.gamma1 / 2.0;
            }
            if row == last {
                damping += self.gamma2 / 2.0;
            }
            -(i() * self.delta[row] + damping)
        } else if row.abs_diff(col) == 1 {
            i() * self.g[row.min(col)]
        } else {
            C64::from(0.0)
        }
    }

    fn input(&self, port: Port, site: usize) -> C64 {
        C64::from(match port {
            Port::One if site == 0 => -self.gamma1.sqrt(),
            Port::Two if site == self.dim() - 1 => self.gamma2.sqrt(),
            _ => 0.0,
        })
    }

    fn output(&self, port: Port, site: usize) -> C64 {
        C64::from(match port {
            Port::One if site == 0 => self.gamma1.sqrt(),
            Port::Two if site == self.dim() - 1 => -self.gamma2.sqrt(),
            _ => 0.0,
        })
    }

    fn passthrough(&self, out: Port, inp: Port) -> C64 {
        C64::from(if out == inp { 1.0 } else { 0.0 })
    }

    fn is_tridiagonal(&self) -> bool {
        true
    }
}
