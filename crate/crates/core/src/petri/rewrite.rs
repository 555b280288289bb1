//! Conflict resolutions turning a place with two downstream transitions into
//! deterministic structure, possibly with negative multiplicities.

use super::net::{Downstream, EdgeSpec, NetSpec, PlaceSpec};
use super::{PetriError, PetriNet};

const FRACTION_TOL: f64 = 1e-12;

/// Removes the conflict place from the spec and returns it with its
/// production edges.
fn split_conflict(net: &PetriNet, place: &str) -> Result<(NetSpec, PlaceSpec, Vec<EdgeSpec>), PetriError> {
    let mut spec = net.to_spec();
    let idx = spec
        .places
        .iter()
        .position(|p| p.id == place)
        .ok_or_else(|| PetriError::UnknownPlace(place.to_string()))?;
    let conflict = spec.places.remove(idx);
    let n = conflict.downstream.names().len();
    if n != 2 {
        return Err(PetriError::UnsupportedConflict {
            place: place.to_string(),
            downstream: n,
        });
    }
    let (inputs, rest): (Vec<EdgeSpec>, Vec<EdgeSpec>) = spec.edges.drain(..).partition(|e| e.place == place);
    spec.edges = rest;
    Ok((spec, conflict, inputs))
}

fn resolve_pair<'a>(conflict: &PlaceSpec, given: [&'a str; 2]) -> Result<[&'a str; 2], PetriError> {
    let ds = conflict.downstream.names();
    for t in given {
        if !ds.contains(&t) {
            return Err(PetriError::UnknownTransition(format!("{t} is not downstream of {}", conflict.id)));
        }
    }
    if given[0] == given[1] {
        return Err(PetriError::UnknownTransition(format!("{} listed twice", given[0])));
    }
    Ok(given)
}

fn sub_place(conflict: &PlaceSpec, t: &str, marking: f64) -> PlaceSpec {
    PlaceSpec {
        id: format!("{}@{t}", conflict.id),
        marking,
        downstream: Downstream::One(t.to_string()),
        holding: 1,
    }
}

/// Priority to `order[0]`:
/// `q_hi^k = a + Σ m q^{k−1} − q_lo^{k−1}`, `q_lo^k = a + Σ m q^{k−1} − q_hi^k`.
pub fn build_priority_resolution(net: &PetriNet, place: &str, order: &[&str]) -> Result<PetriNet, PetriError> {
    let (mut spec, conflict, inputs) = split_conflict(net, place)?;
    let [hi, lo] = match order {
        [a, b] => resolve_pair(&conflict, [a, b])?,
        _ => {
            return Err(PetriError::UnsupportedConflict {
                place: place.to_string(),
                downstream: order.len(),
            })
        }
    };
    for (t, other, lag) in [(hi, lo, 1), (lo, hi, 0)] {
        let sub = sub_place(&conflict, t, conflict.marking);
        spec.edges.extend(inputs.iter().map(|e| EdgeSpec {
            place: sub.id.clone(),
            ..e.clone()
        }));
        spec.edges.push(EdgeSpec {
            transition: other.to_string(),
            place: sub.id.clone(),
            multiplicity: -1.0,
            lag,
        });
        spec.places.push(sub);
    }
    PetriNet::from_spec(&spec)
}

/// Fixed-proportion routing: `q_i^k = a_i + f_i Σ m q^{k−1}` where the first
/// listed transition receives the marking `a` and the other receives 0.
pub fn build_routing_resolution(net: &PetriNet, place: &str, fractions: &[(&str, f64)]) -> Result<PetriNet, PetriError> {
    let (mut spec, conflict, inputs) = split_conflict(net, place)?;
    let [(t1, f1), (t2, f2)] = match fractions {
        [a, b] => [*a, *b],
        _ => {
            return Err(PetriError::UnsupportedConflict {
                place: place.to_string(),
                downstream: fractions.len(),
            })
        }
    };
    resolve_pair(&conflict, [t1, t2])?;
    if f1 < 0.0 || f2 < 0.0 || ((f1 + f2) - 1.0).abs() > FRACTION_TOL {
        return Err(PetriError::BadFractions(f1 + f2));
    }
    for (t, f, marking) in [(t1, f1, conflict.marking), (t2, f2, 0.0)] {
        let sub = sub_place(&conflict, t, marking);
        spec.edges.extend(inputs.iter().map(|e| EdgeSpec {
            place: sub.id.clone(),
            multiplicity: e.multiplicity * f,
            ..e.clone()
        }));
        spec.places.push(sub);
    }
    PetriNet::from_spec(&spec)
}
