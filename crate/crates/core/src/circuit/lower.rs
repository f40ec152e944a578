use core::f64::consts::PI;

use alloc::string::String;
use alloc::vec::Vec;

use super::angle::Angle;
use super::compile::Section;
use super::gate::{Circuit, Gate, QubitMask};
use super::pulse::{AngleExpr, Bindings, Item, Pulse, PulseName, PulseProgram, Target};
use crate::{Error, Result};

/// Result of lowering a pulse program.
#[derive(Debug, Clone, PartialEq)]
pub struct Lowered {
    pub circuit: Circuit,
    /// Crosstalk-correction pulses skipped by the lowering.
    pub dropped_crosstalk: usize,
}

const HIDE_ORDER: [PulseName; 3] = [PulseName::HidingA, PulseName::HidingB, PulseName::HidingC];
const UNHIDE_ORDER: [PulseName; 3] = [PulseName::HidingC, PulseName::HidingB, PulseName::HidingA];

fn structure(pulse: &Pulse, message: impl Into<String>) -> Error {
    Error::Structure(alloc::format!("line {}: {}", pulse.line, message.into()))
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() < 1e-9
}

/// Recognizes a hiding triple starting at `pulses[0]`: `A, B, C` with
/// `(π, 0)` shelves the ion, `C, B, A` with `(π, π)` brings it back.
fn hiding_marker(pulses: &[&Pulse], bindings: &Bindings) -> Result<Gate> {
    let first = pulses[0];
    let site = match first.target {
        Target::Site(s) => s,
        Target::All => return Err(structure(first, "hiding pulses need an addressed target")),
    };
    if pulses.len() < 3 {
        return Err(structure(first, "incomplete hiding triple"));
    }
    let names = [pulses[0].name, pulses[1].name, pulses[2].name];
    let (gate, phase) = if names == HIDE_ORDER {
        (Gate::Hide(site), 0.0)
    } else if names == UNHIDE_ORDER {
        (Gate::Unhide(site), PI)
    } else {
        return Err(structure(
            first,
            alloc::format!(
                "hiding pulses {}, {}, {} do not form a hide or unhide triple",
                names[0], names[1], names[2]
            ),
        ));
    };
    for p in &pulses[..3] {
        let theta = p.theta.eval(bindings)?;
        let phi = p.phi.as_ref().map_or(Ok(0.0), |e| e.eval(bindings))?;
        if p.target != Target::Site(site) || !close(theta, PI) || !close(phi, phase) {
            return Err(structure(
                p,
                alloc::format!("{p} breaks the hiding triple for site {site}"),
            ));
        }
    }
    Ok(gate)
}

/// Lowers pulses to gates, binding free symbols from `bindings`.
///
/// Global `R` and `MS` pulses act on the sites not currently hidden. A
/// `Z(θ, q)` pulse is the rotation `exp(+i(θ/2)σᶻ)`, i.e. the gate
/// `AddressedZ(−θ)`. Crosstalk-correction pulses are counted and dropped.
pub fn pulses_to_circuit(program: &PulseProgram, bindings: &Bindings) -> Result<Lowered> {
    let n = program.n_sites;
    let kept: Vec<&Pulse> = program.pulses().filter(|p| !p.crosstalk).collect();
    let dropped_crosstalk = program.crosstalk_count();
    let mut gates = Vec::new();
    let mut hidden = QubitMask::EMPTY;
    let mut k = 0;
    while k < kept.len() {
        let p = kept[k];
        if p.name.is_hiding() {
            let gate = hiding_marker(&kept[k..], bindings)?;
            match gate {
                Gate::Hide(s) if hidden.contains(s) => {
                    return Err(structure(p, alloc::format!("site {s} is already hidden")))
                }
                Gate::Unhide(s) if !hidden.contains(s) => {
                    return Err(structure(p, alloc::format!("site {s} is not hidden")))
                }
                Gate::Hide(s) => hidden = hidden.with(s),
                Gate::Unhide(s) => hidden = hidden.without(s),
                _ => unreachable!(),
            }
            gates.push(gate);
            k += 3;
            continue;
        }
        let theta = Angle::numeric(p.theta.eval(bindings)?);
        let phi = p.phi.as_ref().map_or(Ok(0.0), |e| e.eval(bindings))?;
        let active = hidden.complement(n);
        let gate = match (p.name, p.target) {
            (PulseName::R, Target::All) => Gate::CollectiveRotation { theta, phi, active },
            (PulseName::R, Target::Site(site)) => Gate::AddressedRotation { theta, phi, site },
            (PulseName::MS, _) => Gate::EntanglingMS { theta, phi, active },
            (PulseName::Z, Target::Site(site)) => Gate::AddressedZ {
                theta: -theta,
                site,
            },
            _ => return Err(structure(p, alloc::format!("cannot lower {p}"))),
        };
        if let Gate::AddressedRotation { site, .. } | Gate::AddressedZ { site, .. } = gate {
            if hidden.contains(site) {
                return Err(structure(p, alloc::format!("{p} addresses hidden site {site}")));
            }
        }
        gates.push(gate);
        k += 1;
    }
    Ok(Lowered {
        circuit: Circuit::from_gates(n, gates)?,
        dropped_crosstalk,
    })
}

fn pulse(name: PulseName, theta: AngleExpr, phi: Option<AngleExpr>, target: Target) -> Item {
    Item::Pulse(Pulse {
        name,
        theta,
        phi,
        target,
        crosstalk: false,
        line: 0,
    })
}

fn radians(x: f64) -> AngleExpr {
    AngleExpr::from_angle(&Angle::numeric(x), false)
}

fn window_comment(section: Section, index: usize, step: usize) -> String {
    match section {
        Section::Zz => alloc::format!("% STEP {} HZZ WINDOW {index} ON 1..{}", step + 1, index + 1),
        Section::Hopping => alloc::format!("% STEP {} SIGMA± ON {index},{}", step + 1, index + 1),
        Section::Local => alloc::format!("% STEP {} HZ TERM", step + 1),
    }
}

/// Prints a circuit as a pulse program, the inverse of
/// [`pulses_to_circuit`]. With `symbolic`, compiler angles are written in
/// terms of `m`, `J`, `w` and `Delta_t`.
pub fn circuit_to_pulses(circuit: &Circuit, symbolic: bool) -> PulseProgram {
    let mut program = PulseProgram::new(circuit.n_sites());
    for (k, gate) in circuit.gates().iter().enumerate() {
        if let Some(w) = circuit.windows().iter().find(|w| w.gates.start == k && !w.gates.is_empty()) {
            program.items.push(Item::Comment(window_comment(w.section, w.index, w.step)));
        }
        let angle = |a: &Angle| AngleExpr::from_angle(a, symbolic);
        match *gate {
            Gate::CollectiveRotation { theta, phi, .. } => program.items.push(pulse(
                PulseName::R,
                angle(&theta),
                Some(radians(phi)),
                Target::All,
            )),
            Gate::AddressedRotation { theta, phi, site } => program.items.push(pulse(
                PulseName::R,
                angle(&theta),
                Some(radians(phi)),
                Target::Site(site),
            )),
            Gate::EntanglingMS { theta, phi, .. } => program.items.push(pulse(
                PulseName::MS,
                angle(&theta),
                Some(radians(phi)),
                Target::All,
            )),
            Gate::AddressedZ { theta, site } => {
                program
                    .items
                    .push(pulse(PulseName::Z, angle(&-theta), None, Target::Site(site)))
            }
            Gate::Hide(site) | Gate::Unhide(site) => {
                let (order, phase) = if matches!(gate, Gate::Hide(_)) {
                    (HIDE_ORDER, 0.0)
                } else {
                    (UNHIDE_ORDER, PI)
                };
                for name in order {
                    program.items.push(pulse(
                        name,
                        radians(PI),
                        Some(radians(phase)),
                        Target::Site(site),
                    ));
                }
            }
        }
    }
    program
}
