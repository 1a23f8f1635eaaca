//! Open linear quantum systems with labelled field ports, and elimination of
//! the field links between them.
//!
//! Each element has inputs `w` and outputs `y`, both two quadratures wide:
//!
//! ```text
//! dx = A x dt + Σ_in G_in dw_in
//! dy_out = C_out x dt + Σ_in D_(out,in) dw_in
//! ```
//!
//! [`connect`] stacks the elements, substitutes every linked input
//! `w = ±y` and solves the resulting port equations in one linear solve.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use nalgebra::{DMatrix, Vector2};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::Serialize;

use crate::linalg::{block_diag, j2, max_abs, set_block};
use crate::observer::{detunings_from_gains, gains_from_kappas, ChainParams, PlantSpec};
use crate::{Error, Result};

/// Smallest singular value of the loop matrix, relative to its largest,
/// below which the loop is treated as singular.
pub const LOOP_SINGULAR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum PortLabel {
    A,
    B,
}

impl fmt::Display for PortLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PortLabel::A => "a",
            PortLabel::B => "b",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Direction {
    In,
    Out,
}

/// A two-quadrature field port. `element` is the position in the list of
/// systems handed to [`connect`]; ports print with the 1-based element number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct FieldPort {
    pub element: usize,
    pub label: PortLabel,
    pub direction: Direction,
}

impl FieldPort {
    pub const WIDTH: usize = 2;

    pub fn input(element: usize, label: PortLabel) -> Self {
        Self { element, label, direction: Direction::In }
    }

    pub fn output(element: usize, label: PortLabel) -> Self {
        Self { element, label, direction: Direction::Out }
    }
}

impl fmt::Display for FieldPort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sym = match self.direction {
            Direction::In => 'w',
            Direction::Out => 'y',
        };
        write!(f, "{sym}_{}{}", self.element + 1, self.label)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OpenSystem {
    drift: DMatrix<f64>,
    input_gains: BTreeMap<PortLabel, DMatrix<f64>>,
    output_gains: BTreeMap<PortLabel, DMatrix<f64>>,
    feedthrough: BTreeMap<(PortLabel, PortLabel), DMatrix<f64>>,
}

impl OpenSystem {
    /// `feedthrough` is keyed by `(output, input)`; missing pairs are zero.
    pub fn new(
        drift: DMatrix<f64>,
        input_gains: BTreeMap<PortLabel, DMatrix<f64>>,
        output_gains: BTreeMap<PortLabel, DMatrix<f64>>,
        feedthrough: BTreeMap<(PortLabel, PortLabel), DMatrix<f64>>,
    ) -> Result<Self> {
        let n = crate::linalg::ensure_square(&drift, "drift")?;
        if n == 0 || n % 2 != 0 {
            return Err(Error::DimensionMismatch(format!("state dimension must be even and positive, got {n}")));
        }
        for (label, g) in &input_gains {
            if g.shape() != (n, FieldPort::WIDTH) {
                return Err(Error::DimensionMismatch(format!(
                    "input gain for port {label} is {}×{}, expected {n}×2",
                    g.nrows(),
                    g.ncols()
                )));
            }
        }
        for (label, c) in &output_gains {
            if c.shape() != (FieldPort::WIDTH, n) {
                return Err(Error::DimensionMismatch(format!(
                    "output gain for port {label} is {}×{}, expected 2×{n}",
                    c.nrows(),
                    c.ncols()
                )));
            }
        }
        for ((out, inp), d) in &feedthrough {
            if !output_gains.contains_key(out) {
                return Err(Error::UnknownPort(format!("feedthrough from undeclared output y_{out}")));
            }
            if !input_gains.contains_key(inp) {
                return Err(Error::UnknownPort(format!("feedthrough onto undeclared input w_{inp}")));
            }
            if d.shape() != (2, 2) {
                return Err(Error::DimensionMismatch(format!("feedthrough ({out}, {inp}) must be 2×2")));
            }
        }
        Ok(Self { drift, input_gains, output_gains, feedthrough })
    }

    pub fn state_dim(&self) -> usize {
        self.drift.nrows()
    }

    pub fn drift(&self) -> &DMatrix<f64> {
        &self.drift
    }

    pub fn input_gain(&self, label: PortLabel) -> Option<&DMatrix<f64>> {
        self.input_gains.get(&label)
    }

    pub fn output_gain(&self, label: PortLabel) -> Option<&DMatrix<f64>> {
        self.output_gains.get(&label)
    }

    pub fn feedthrough(&self, out: PortLabel, inp: PortLabel) -> Option<&DMatrix<f64>> {
        self.feedthrough.get(&(out, inp))
    }

    pub fn inputs(&self) -> impl Iterator<Item = PortLabel> + '_ {
        self.input_gains.keys().copied()
    }

    pub fn outputs(&self) -> impl Iterator<Item = PortLabel> + '_ {
        self.output_gains.keys().copied()
    }
}

fn check_rate(name: &str, kappa: f64) -> Result<f64> {
    if kappa > 0.0 && kappa.is_finite() {
        Ok(kappa.sqrt())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be positive, got {kappa}")))
    }
}

fn eye2() -> DMatrix<f64> {
    DMatrix::identity(2, 2)
}

/// Plant plus first observer element, coupled directly through the
/// parametric-amplifier Hamiltonian. State `(x_p, x_{o1})`; one input
/// `w_{1b}` and one output `y_{1a}`.
pub fn make_plant_ndpa(alpha: Vector2<f64>, beta: Vector2<f64>, kappa_1b: f64, omega_1: f64) -> Result<OpenSystem> {
    let sk = check_rate("kappa_1b", kappa_1b)?;
    if alpha.norm() == 0.0 || !alpha.iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidArgument("alpha must be finite and nonzero".into()));
    }
    if !beta.iter().all(|v| v.is_finite()) || !omega_1.is_finite() {
        return Err(Error::InvalidArgument("beta and omega_1 must be finite".into()));
    }
    let j = j2();
    let ab = DMatrix::from_fn(2, 2, |r, c| alpha[r] * beta[c]);
    let mut drift = DMatrix::zeros(4, 4);
    set_block(&mut drift, 0, 2, &(&j * &ab * 2.0));
    set_block(&mut drift, 2, 0, &(&j * ab.transpose() * 2.0));
    set_block(&mut drift, 2, 2, &(&j * (2.0 * omega_1) - eye2() * (0.5 * kappa_1b)));

    let mut g = DMatrix::zeros(4, 2);
    set_block(&mut g, 2, 0, &(eye2() * -sk));
    let mut c = DMatrix::zeros(2, 4);
    set_block(&mut c, 0, 2, &(eye2() * sk));

    OpenSystem::new(
        drift,
        BTreeMap::from([(PortLabel::B, g)]),
        BTreeMap::from([(PortLabel::A, c)]),
        BTreeMap::from([((PortLabel::A, PortLabel::B), eye2())]),
    )
}

/// Mid-chain cavity. The outputs are cross-paired with the inputs:
/// `y_a = √κ_b x + w_b`, `y_b = √κ_a x + w_a`.
pub fn make_cavity(omega: f64, kappa_a: f64, kappa_b: f64) -> Result<OpenSystem> {
    let sa = check_rate("kappa_a", kappa_a)?;
    let sb = check_rate("kappa_b", kappa_b)?;
    if !omega.is_finite() {
        return Err(Error::InvalidArgument("omega must be finite".into()));
    }
    let drift = j2() * (2.0 * omega) - eye2() * (0.5 * (kappa_a + kappa_b));
    OpenSystem::new(
        drift,
        BTreeMap::from([(PortLabel::A, eye2() * -sa), (PortLabel::B, eye2() * -sb)]),
        BTreeMap::from([(PortLabel::A, eye2() * sb), (PortLabel::B, eye2() * sa)]),
        BTreeMap::from([((PortLabel::A, PortLabel::B), eye2()), ((PortLabel::B, PortLabel::A), eye2())]),
    )
}

/// Last cavity: input `w_a`, output `y_b = √κ_a x + w_a`.
pub fn make_end_cavity(omega: f64, kappa_a: f64) -> Result<OpenSystem> {
    let sa = check_rate("kappa_a", kappa_a)?;
    if !omega.is_finite() {
        return Err(Error::InvalidArgument("omega must be finite".into()));
    }
    let drift = j2() * (2.0 * omega) - eye2() * (0.5 * kappa_a);
    OpenSystem::new(
        drift,
        BTreeMap::from([(PortLabel::A, eye2() * -sa)]),
        BTreeMap::from([(PortLabel::B, eye2() * sa)]),
        BTreeMap::from([((PortLabel::B, PortLabel::A), eye2())]),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// `w_sink = sign · y_source`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Link {
    pub source: FieldPort,
    pub sink: FieldPort,
    pub sign: Sign,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct InterconnectionMap {
    links: Vec<Link>,
}

impl InterconnectionMap {
    pub fn new(links: Vec<Link>) -> Result<Self> {
        let mut sources = BTreeSet::new();
        let mut sinks = BTreeSet::new();
        for l in &links {
            if l.source.direction != Direction::Out {
                return Err(Error::InvalidLink(format!("link source {} is not an output", l.source)));
            }
            if l.sink.direction != Direction::In {
                return Err(Error::InvalidLink(format!("link sink {} is not an input", l.sink)));
            }
            if !sources.insert(l.source) {
                return Err(Error::InvalidLink(format!("output {} is linked twice", l.source)));
            }
            if !sinks.insert(l.sink) {
                return Err(Error::InvalidLink(format!("input {} is linked twice", l.sink)));
            }
        }
        Ok(Self { links })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    /// Same map without the link at `index`.
    pub fn without(&self, index: usize) -> Self {
        let mut links = self.links.clone();
        links.remove(index);
        Self { links }
    }
}

/// Links of the cavity chain: for `i = 1..N−1`, `w_{(i+1)a} = −y_{ia}` and
/// `w_{ib} = y_{(i+1)b}`.
pub fn chain_links(n: usize) -> Result<InterconnectionMap> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("a chain needs at least 2 elements to have links, got {n}")));
    }
    let mut links = Vec::with_capacity(2 * (n - 1));
    for e in 0..n - 1 {
        links.push(Link {
            source: FieldPort::output(e, PortLabel::A),
            sink: FieldPort::input(e + 1, PortLabel::A),
            sign: Sign::Minus,
        });
        links.push(Link {
            source: FieldPort::output(e + 1, PortLabel::B),
            sink: FieldPort::input(e, PortLabel::B),
            sign: Sign::Plus,
        });
    }
    InterconnectionMap::new(links)
}

#[derive(Debug, Clone, Serialize)]
pub struct ReducedSystem {
    #[serde(skip)]
    pub drift: DMatrix<f64>,
    /// Columns are the unlinked inputs, two per port, in `open_inputs` order.
    #[serde(skip)]
    pub residual_noise: DMatrix<f64>,
    pub open_inputs: Vec<FieldPort>,
    pub eliminated: Vec<FieldPort>,
    pub state_offsets: Vec<usize>,
}

/// Eliminates all linked field variables.
///
/// With `y = Cx + Du`, `u = Sy + Eu_open`, the outputs solve
/// `(I − DS)y = Cx + DEu_open`, giving drift `A + BS(I − DS)⁻¹C` and noise
/// gain `B(E + S(I − DS)⁻¹DE)`.
pub fn connect(systems: &[OpenSystem], links: &InterconnectionMap) -> Result<ReducedSystem> {
    let mut state_offsets = Vec::with_capacity(systems.len());
    let mut n = 0;
    for s in systems {
        state_offsets.push(n);
        n += s.state_dim();
    }

    let mut inputs: Vec<FieldPort> = Vec::new();
    let mut outputs: Vec<FieldPort> = Vec::new();
    for (e, s) in systems.iter().enumerate() {
        inputs.extend(s.inputs().map(|l| FieldPort::input(e, l)));
        outputs.extend(s.outputs().map(|l| FieldPort::output(e, l)));
    }
    let in_idx: BTreeMap<FieldPort, usize> = inputs.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    let out_idx: BTreeMap<FieldPort, usize> = outputs.iter().enumerate().map(|(i, p)| (*p, i)).collect();

    for l in links.links() {
        if !out_idx.contains_key(&l.source) {
            return Err(Error::UnknownPort(format!("link source {} does not exist", l.source)));
        }
        if !in_idx.contains_key(&l.sink) {
            return Err(Error::UnknownPort(format!("link sink {} does not exist", l.sink)));
        }
    }

    let (nu, ny) = (2 * inputs.len(), 2 * outputs.len());
    let a = block_diag(&systems.iter().map(|s| s.drift()).collect::<Vec<_>>());
    let mut b = DMatrix::zeros(n, nu);
    let mut c = DMatrix::zeros(ny, n);
    let mut d = DMatrix::zeros(ny, nu);
    for (k, p) in inputs.iter().enumerate() {
        let g = systems[p.element].input_gain(p.label).expect("declared input");
        set_block(&mut b, state_offsets[p.element], 2 * k, g);
    }
    for (k, p) in outputs.iter().enumerate() {
        let s = &systems[p.element];
        set_block(&mut c, 2 * k, state_offsets[p.element], s.output_gain(p.label).expect("declared output"));
        for inp in s.inputs() {
            if let Some(dd) = s.feedthrough(p.label, inp) {
                set_block(&mut d, 2 * k, 2 * in_idx[&FieldPort::input(p.element, inp)], dd);
            }
        }
    }

    let linked: BTreeMap<FieldPort, &Link> = links.links().iter().map(|l| (l.sink, l)).collect();
    let open_inputs: Vec<FieldPort> = inputs.iter().copied().filter(|p| !linked.contains_key(p)).collect();
    let mut s_mat = DMatrix::zeros(nu, ny);
    for l in links.links() {
        set_block(&mut s_mat, 2 * in_idx[&l.sink], 2 * out_idx[&l.source], &(eye2() * l.sign.value()));
    }
    let mut e_mat = DMatrix::zeros(nu, 2 * open_inputs.len());
    for (k, p) in open_inputs.iter().enumerate() {
        set_block(&mut e_mat, 2 * in_idx[p], 2 * k, &eye2());
    }

    let loop_m = DMatrix::identity(ny, ny) - &d * &s_mat;
    let sol_rhs = {
        let mut rhs = DMatrix::zeros(ny, n + e_mat.ncols());
        set_block(&mut rhs, 0, 0, &c);
        set_block(&mut rhs, 0, n, &(&d * &e_mat));
        rhs
    };
    let solved = if ny == 0 {
        sol_rhs
    } else {
        let sv = loop_m.singular_values();
        let (smax, smin) = (sv.max(), sv.min());
        if !(smin > LOOP_SINGULAR_TOL * smax.max(1.0)) {
            return Err(Error::AlgebraicLoop { cycle: loop_cycle(systems, links, &outputs, &inputs) });
        }
        loop_m
            .lu()
            .solve(&sol_rhs)
            .ok_or_else(|| Error::AlgebraicLoop { cycle: loop_cycle(systems, links, &outputs, &inputs) })?
    };
    let y_x = solved.columns(0, n);
    let y_u = solved.columns(n, e_mat.ncols());

    let bs = &b * &s_mat;
    let drift = &a + &bs * y_x;
    let residual_noise = &b * &e_mat + &bs * y_u;

    let mut eliminated: Vec<FieldPort> = links.links().iter().flat_map(|l| [l.source, l.sink]).collect();
    eliminated.sort();

    Ok(ReducedSystem { drift, residual_noise, open_inputs, eliminated, state_offsets })
}

/// Names the ports on a directed cycle of direct (feedthrough) dependencies
/// between linked outputs.
fn loop_cycle(
    systems: &[OpenSystem],
    links: &InterconnectionMap,
    outputs: &[FieldPort],
    inputs: &[FieldPort],
) -> Vec<String> {
    let mut graph = DiGraph::<FieldPort, ()>::new();
    let nodes: BTreeMap<FieldPort, _> = outputs.iter().map(|p| (*p, graph.add_node(*p))).collect();
    let by_sink: BTreeMap<FieldPort, FieldPort> = links.links().iter().map(|l| (l.sink, l.source)).collect();
    for out in outputs {
        let sys = &systems[out.element];
        for inp in inputs.iter().filter(|p| p.element == out.element) {
            let direct = sys.feedthrough(out.label, inp.label).is_some_and(|d| max_abs(d) > 0.0);
            if let (true, Some(src)) = (direct, by_sink.get(inp)) {
                graph.add_edge(nodes[src], nodes[out], ());
            }
        }
    }
    let cyc = tarjan_scc(&graph)
        .into_iter()
        .find(|c| c.len() > 1 || graph.contains_edge(c[0], c[0]))
        .unwrap_or_default();
    let mut names: Vec<FieldPort> = cyc.iter().map(|ix| graph[*ix]).collect();
    names.sort();
    names.iter().map(|p| p.to_string()).collect()
}

/// Largest absolute entry of the residual noise gain.
pub fn verify_noise_cancellation(reduced: &ReducedSystem) -> f64 {
    max_abs(&reduced.residual_noise)
}

/// The chain as a list of open systems plus its links. Element 0 is the
/// plant with the first observer, element `i` is cavity `i+1`.
#[derive(Debug, Clone)]
pub struct ChainNetwork {
    pub systems: Vec<OpenSystem>,
    pub links: InterconnectionMap,
}

impl ChainNetwork {
    pub fn reduce(&self) -> Result<ReducedSystem> {
        connect(&self.systems, &self.links)
    }
}

/// Builds the cavity network for `params`, using the detunings implied by the
/// gains. Needs `N ≥ 2`.
pub fn build_chain_network(plant: &PlantSpec, params: &ChainParams) -> Result<ChainNetwork> {
    let mu = gains_from_kappas(params);
    build_chain_network_with_detunings(plant, params, &detunings_from_gains(&mu))
}

pub fn build_chain_network_with_detunings(
    plant: &PlantSpec,
    params: &ChainParams,
    omega: &[f64],
) -> Result<ChainNetwork> {
    let n = params.n();
    if n < 2 {
        return Err(Error::InvalidArgument("a single-element observer has no field network".into()));
    }
    if omega.len() != n {
        return Err(Error::DimensionMismatch(format!("{} detunings for {n} elements", omega.len())));
    }
    let alpha = plant.alpha();
    let beta = alpha * -params.mu_1();
    let mut systems = vec![make_plant_ndpa(alpha, beta, params.kappa_b(1), omega[0])?];
    for i in 2..n {
        systems.push(make_cavity(omega[i - 1], params.kappa_a(i), params.kappa_b(i))?);
    }
    systems.push(make_end_cavity(omega[n - 1], params.kappa_a(n))?);
    Ok(ChainNetwork { systems, links: chain_links(n)? })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(s: OpenSystem) -> ReducedSystem {
        connect(&[s], &InterconnectionMap::empty()).unwrap()
    }

    #[test]
    fn ndpa_plant_row() {
        let s = make_plant_ndpa(Vector2::new(1.0, 0.0), Vector2::new(-1.0, 0.0), 4.0, 2.0).unwrap();
        let block = s.drift().view((0, 2), (2, 2)).clone_owned();
        assert_eq!(block, DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 2.0, 0.0]));
        assert_eq!(s.feedthrough(PortLabel::A, PortLabel::B), Some(&eye2()));
        assert_eq!(s.state_dim(), 4);
    }

    #[test]
    fn ndpa_without_coupling() {
        let s = make_plant_ndpa(Vector2::new(1.0, 0.0), Vector2::zeros(), 4.0, 2.0).unwrap();
        assert!(s.drift().rows(0, 2).iter().all(|v| *v == 0.0));
        assert!(make_plant_ndpa(Vector2::new(1.0, 0.0), Vector2::zeros(), 0.0, 2.0).is_err());
        assert!(make_plant_ndpa(Vector2::zeros(), Vector2::zeros(), 1.0, 2.0).is_err());
    }

    #[test]
    fn cavity_drift_and_pairing() {
        let s = make_cavity(0.0, 2.0, 2.0).unwrap();
        assert_eq!(s.drift(), &(eye2() * -2.0));
        let s = make_cavity(1.0, 4.0, 0.25).unwrap();
        assert_eq!(s.drift(), &(j2() * 2.0 - eye2() * 2.125));
        assert!(s.feedthrough(PortLabel::A, PortLabel::A).is_none());
        assert_eq!(s.feedthrough(PortLabel::A, PortLabel::B), Some(&eye2()));
        assert_eq!(s.output_gain(PortLabel::A), Some(&(eye2() * 0.5)));
        assert!(make_cavity(1.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn end_cavity() {
        let s = make_end_cavity(1.0, 4.0).unwrap();
        assert_eq!(s.drift(), &(j2() * 2.0 - eye2() * 2.0));
        assert_eq!(s.input_gain(PortLabel::A), Some(&(eye2() * -2.0)));
        assert_eq!((s.inputs().count(), s.outputs().count()), (1, 1));
        assert!(make_end_cavity(1.0, 0.0).is_err());
    }

    #[test]
    fn chain_link_lists() {
        let m = chain_links(2).unwrap();
        assert_eq!(
            m.links(),
            &[
                Link {
                    source: FieldPort::output(0, PortLabel::A),
                    sink: FieldPort::input(1, PortLabel::A),
                    sign: Sign::Minus
                },
                Link {
                    source: FieldPort::output(1, PortLabel::B),
                    sink: FieldPort::input(0, PortLabel::B),
                    sign: Sign::Plus
                },
            ]
        );
        assert_eq!(chain_links(3).unwrap().len(), 4);
        assert!(chain_links(1).is_err());
        assert_eq!(m.links()[0].source.to_string(), "y_1a");
    }

    #[test]
    fn duplicate_ports_rejected() {
        let l = Link {
            source: FieldPort::output(0, PortLabel::A),
            sink: FieldPort::input(1, PortLabel::A),
            sign: Sign::Plus,
        };
        let mut l2 = l;
        l2.sink = FieldPort::input(1, PortLabel::B);
        assert!(matches!(InterconnectionMap::new(vec![l, l2]), Err(Error::InvalidLink(_))));
        let mut bad = l;
        bad.source = FieldPort::input(0, PortLabel::A);
        assert!(matches!(InterconnectionMap::new(vec![bad]), Err(Error::InvalidLink(_))));
    }

    #[test]
    fn dangling_link_is_unknown_port() {
        let links = chain_links(3).unwrap();
        let systems = [make_cavity(1.0, 1.0, 1.0).unwrap(), make_end_cavity(1.0, 1.0).unwrap()];
        assert!(matches!(connect(&systems, &links), Err(Error::UnknownPort(_))));
    }

    #[test]
    fn two_element_hand_elimination() {
        // κ_{1b} = κ_{2a} = 4 gives μ₂ = 1; μ₁ = 1, ω = (2, 1).
        let alpha = Vector2::new(1.0, 0.0);
        let systems = [
            make_plant_ndpa(alpha, -alpha, 4.0, 2.0).unwrap(),
            make_end_cavity(1.0, 4.0).unwrap(),
        ];
        let red = connect(&systems, &chain_links(2).unwrap()).unwrap();
        let j = j2();
        let mut expected = DMatrix::zeros(6, 6);
        let ab = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 0.0]);
        set_block(&mut expected, 0, 2, &(&j * &ab * 2.0));
        set_block(&mut expected, 2, 0, &(&j * ab.transpose() * 2.0));
        set_block(&mut expected, 2, 2, &(&j * 4.0));
        set_block(&mut expected, 2, 4, &(eye2() * -2.0));
        set_block(&mut expected, 4, 4, &(&j * 2.0));
        set_block(&mut expected, 4, 2, &(eye2() * 2.0));
        assert!(max_abs(&(&red.drift - expected)) < 1e-14);
        assert_eq!(red.residual_noise.ncols(), 0);
        assert_eq!(verify_noise_cancellation(&red), 0.0);
    }

    #[test]
    fn empty_map_is_block_diagonal() {
        let systems = [make_cavity(1.0, 1.0, 4.0).unwrap(), make_end_cavity(0.5, 9.0).unwrap()];
        let red = connect(&systems, &InterconnectionMap::empty()).unwrap();
        let expected = block_diag(&[systems[0].drift(), systems[1].drift()]);
        assert_eq!(red.drift, expected);
        assert_eq!(red.residual_noise.ncols(), 6);
        assert_eq!(verify_noise_cancellation(&red), 3.0);
    }

    #[test]
    fn lone_cavity_residual() {
        let red = single(make_cavity(1.0, 4.0, 0.25).unwrap());
        assert_eq!(verify_noise_cancellation(&red), 2.0);
    }

    #[test]
    fn broken_chain_keeps_noise() {
        let params = ChainParams::new(1.0, vec![4.0, 1.0, 2.0, 3.0]).unwrap();
        let net = build_chain_network(&PlantSpec::new([1.0, 0.0]).unwrap(), &params).unwrap();
        assert!(verify_noise_cancellation(&net.reduce().unwrap()) < 1e-12);
        for k in 0..net.links.len() {
            let red = connect(&net.systems, &net.links.without(k)).unwrap();
            assert!(verify_noise_cancellation(&red) > 0.1);
        }
    }

    #[test]
    fn self_loop_is_singular() {
        let sys = make_cavity(1.0, 1.0, 1.0).unwrap();
        let links = InterconnectionMap::new(vec![Link {
            source: FieldPort::output(0, PortLabel::A),
            sink: FieldPort::input(0, PortLabel::B),
            sign: Sign::Plus,
        }])
        .unwrap();
        match connect(&[sys], &links) {
            Err(Error::AlgebraicLoop { cycle }) => assert_eq!(cycle, vec!["y_1a".to_string()]),
            other => panic!("expected algebraic loop, got {other:?}"),
        }
    }

    #[test]
    fn two_port_loop_names_both_outputs() {
        let systems = [make_cavity(1.0, 1.0, 1.0).unwrap(), make_cavity(1.0, 1.0, 1.0).unwrap()];
        let links = InterconnectionMap::new(vec![
            Link { source: FieldPort::output(0, PortLabel::A), sink: FieldPort::input(1, PortLabel::B), sign: Sign::Plus },
            Link { source: FieldPort::output(1, PortLabel::A), sink: FieldPort::input(0, PortLabel::B), sign: Sign::Plus },
        ])
        .unwrap();
        match connect(&systems, &links) {
            Err(Error::AlgebraicLoop { cycle }) => assert_eq!(cycle, vec!["y_1a", "y_2a"]),
            other => panic!("expected algebraic loop, got {other:?}"),
        }
    }

    #[test]
    fn single_element_has_no_network() {
        let params = ChainParams::new(1.0, vec![]).unwrap();
        assert!(build_chain_network(&PlantSpec::new([1.0, 0.0]).unwrap(), &params).is_err());
    }
}
