use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use serde::{Deserialize, Serialize};

use super::PetriError;
use crate::scalar::ExtendedReal;
use crate::tropical::MinPlusMatrix;

/// Which firing count of the producing transition feeds a place.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Lag {
    /// `P^{k+1}` uses `Q^{k+1}` of the producer (same step).
    Current,
    /// `P^{k+1}` uses `Q^k` of the producer; the usual unit holding time.
    Previous,
}

impl Lag {
    pub fn steps(self) -> u8 {
        match self {
            Lag::Current => 0,
            Lag::Previous => 1,
        }
    }

    fn from_steps(s: u8) -> Result<Self, PetriError> {
        match s {
            0 => Ok(Lag::Current),
            1 => Ok(Lag::Previous),
            other => Err(PetriError::BadLag(other)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductionEdge {
    pub transition: usize,
    pub place: usize,
    pub multiplicity: f64,
    pub lag: Lag,
}

/// One or several downstream transitions in the file format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Downstream {
    One(String),
    Many(Vec<String>),
}

impl Downstream {
    pub fn names(&self) -> Vec<&str> {
        match self {
            Downstream::One(s) => vec![s.as_str()],
            Downstream::Many(v) => v.iter().map(String::as_str).collect(),
        }
    }
}

fn one() -> usize {
    1
}

fn one_u8() -> u8 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaceSpec {
    pub id: String,
    pub marking: f64,
    pub downstream: Downstream,
    /// Integer holding time; values above 1 are expanded into a chain.
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub holding: usize,
}

fn is_one(h: &usize) -> bool {
    *h == 1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub transition: String,
    pub place: String,
    pub multiplicity: f64,
    #[serde(default = "one_u8")]
    pub lag: u8,
}

/// Name-based description of a net; the JSON file format.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct NetSpec {
    pub transitions: Vec<String>,
    pub places: Vec<PlaceSpec>,
    pub edges: Vec<EdgeSpec>,
}

impl NetSpec {
    pub fn from_json(text: &str) -> Result<Self, PetriError> {
        serde_json::from_str(text).map_err(|e| PetriError::Format(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("net spec serializes")
    }
}

/// Index-based builder.
#[derive(Debug, Default, Clone)]
pub struct NetBuilder {
    transitions: Vec<String>,
    place_names: Vec<String>,
    markings: Vec<f64>,
    downstream: Vec<Vec<usize>>,
    edges: Vec<ProductionEdge>,
}

impl NetBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn transition(&mut self, name: impl Into<String>) -> usize {
        self.transitions.push(name.into());
        self.transitions.len() - 1
    }

    pub fn place(&mut self, name: impl Into<String>, marking: f64, downstream: &[usize]) -> usize {
        self.place_names.push(name.into());
        self.markings.push(marking);
        self.downstream.push(downstream.to_vec());
        self.place_names.len() - 1
    }

    /// A place with holding time `holding ≥ 1`, expanded into a chain of
    /// unit places linked by fresh transitions. Returns the entry place, which
    /// is where production edges must point.
    pub fn place_with_holding(
        &mut self,
        name: impl Into<String>,
        marking: f64,
        downstream: &[usize],
        holding: usize,
    ) -> Result<usize, PetriError> {
        let name = name.into();
        if holding == 0 {
            return Err(PetriError::BadHolding(name));
        }
        if holding == 1 {
            return Ok(self.place(name, marking, downstream));
        }
        let mut link = self.transition(format!("{name}~t1"));
        let entry = self.place(name.clone(), 0.0, &[link]);
        for s in 1..holding - 1 {
            let p = self.place(format!("{name}~{s}"), 0.0, &[]);
            self.edge(link, p, 1.0);
            link = self.transition(format!("{name}~t{}", s + 1));
            self.downstream[p] = vec![link];
        }
        let last = self.place(format!("{name}~{}", holding - 1), marking, downstream);
        self.edge(link, last, 1.0);
        Ok(entry)
    }

    pub fn edge(&mut self, transition: usize, place: usize, multiplicity: f64) {
        self.edge_with_lag(transition, place, multiplicity, Lag::Previous);
    }

    pub fn edge_with_lag(&mut self, transition: usize, place: usize, multiplicity: f64, lag: Lag) {
        self.edges.push(ProductionEdge {
            transition,
            place,
            multiplicity,
            lag,
        });
    }

    pub fn build(self) -> Result<PetriNet, PetriError> {
        PetriNet::assemble(self)
    }
}

/// A timed Petri net `(P, Q, H, D)` with unit holding times and real
/// (possibly negative) production multiplicities.
#[derive(Debug, Clone, PartialEq)]
pub struct PetriNet {
    transitions: Vec<String>,
    places: Vec<String>,
    markings: Vec<f64>,
    downstream: Vec<Vec<usize>>,
    edges: Vec<ProductionEdge>,
    /// Edge indices feeding each place.
    inputs: Vec<Vec<usize>>,
    /// Places feeding each transition.
    in_places: Vec<Vec<usize>>,
    /// Transition evaluation order compatible with same-step edges.
    order: Vec<usize>,
}

/// Result of the conflict-freeness check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Determinism {
    pub deterministic: bool,
    /// Places without exactly one downstream transition, with their count.
    pub offending: Vec<(String, usize)>,
}

impl PetriNet {
    pub fn builder() -> NetBuilder {
        NetBuilder::new()
    }

    fn assemble(b: NetBuilder) -> Result<Self, PetriError> {
        check_unique(&b.transitions)?;
        check_unique(&b.place_names)?;
        let nq = b.transitions.len();
        let np = b.place_names.len();
        for (p, ds) in b.downstream.iter().enumerate() {
            if let Some(&q) = ds.iter().find(|&&q| q >= nq) {
                return Err(PetriError::UnknownTransition(format!("#{q} (place {})", b.place_names[p])));
            }
        }
        let mut inputs = vec![Vec::new(); np];
        for (idx, e) in b.edges.iter().enumerate() {
            if e.transition >= nq {
                return Err(PetriError::UnknownTransition(format!("#{}", e.transition)));
            }
            if e.place >= np {
                return Err(PetriError::UnknownPlace(format!("#{}", e.place)));
            }
            if !e.multiplicity.is_finite() {
                return Err(PetriError::Format(format!(
                    "multiplicity of {} -> {} is not finite",
                    b.transitions[e.transition], b.place_names[e.place]
                )));
            }
            inputs[e.place].push(idx);
        }
        if let Some(p) = b.markings.iter().position(|a| a.is_nan()) {
            return Err(PetriError::Format(format!("marking of {} is NaN", b.place_names[p])));
        }
        let mut in_places = vec![Vec::new(); nq];
        for (p, ds) in b.downstream.iter().enumerate() {
            for &q in ds {
                if !in_places[q].contains(&p) {
                    in_places[q].push(p);
                }
            }
        }
        let order = same_step_order(nq, &b.edges, &b.downstream)
            .map_err(|cyc| PetriError::ImplicitCycle(cyc.iter().map(|&q| b.transitions[q].clone()).collect()))?;
        Ok(Self {
            transitions: b.transitions,
            places: b.place_names,
            markings: b.markings,
            downstream: b.downstream,
            edges: b.edges,
            inputs,
            in_places,
            order,
        })
    }

    pub fn from_spec(spec: &NetSpec) -> Result<Self, PetriError> {
        let mut b = NetBuilder::new();
        let mut tix = HashMap::new();
        for t in &spec.transitions {
            tix.insert(t.as_str(), b.transition(t.clone()));
        }
        let mut pix = HashMap::new();
        for p in &spec.places {
            let ds = p
                .downstream
                .names()
                .into_iter()
                .map(|q| tix.get(q).copied().ok_or_else(|| PetriError::UnknownTransition(q.to_string())))
                .collect::<Result<Vec<_>, _>>()?;
            let idx = b.place_with_holding(p.id.clone(), p.marking, &ds, p.holding)?;
            pix.insert(p.id.as_str(), idx);
        }
        for e in &spec.edges {
            let t = *tix
                .get(e.transition.as_str())
                .ok_or_else(|| PetriError::UnknownTransition(e.transition.clone()))?;
            let p = *pix
                .get(e.place.as_str())
                .ok_or_else(|| PetriError::UnknownPlace(e.place.clone()))?;
            b.edge_with_lag(t, p, e.multiplicity, Lag::from_steps(e.lag)?);
        }
        b.build()
    }

    pub fn from_json(text: &str) -> Result<Self, PetriError> {
        Self::from_spec(&NetSpec::from_json(text)?)
    }

    pub fn to_spec(&self) -> NetSpec {
        NetSpec {
            transitions: self.transitions.clone(),
            places: (0..self.places.len())
                .map(|p| PlaceSpec {
                    id: self.places[p].clone(),
                    marking: self.markings[p],
                    downstream: match self.downstream[p].as_slice() {
                        [q] => Downstream::One(self.transitions[*q].clone()),
                        qs => Downstream::Many(qs.iter().map(|&q| self.transitions[q].clone()).collect()),
                    },
                    holding: 1,
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeSpec {
                    transition: self.transitions[e.transition].clone(),
                    place: self.places[e.place].clone(),
                    multiplicity: e.multiplicity,
                    lag: e.lag.steps(),
                })
                .collect(),
        }
    }

    pub fn transition_count(&self) -> usize {
        self.transitions.len()
    }

    pub fn place_count(&self) -> usize {
        self.places.len()
    }

    pub fn transition_names(&self) -> &[String] {
        &self.transitions
    }

    pub fn place_names(&self) -> &[String] {
        &self.places
    }

    pub fn transition_index(&self, name: &str) -> Option<usize> {
        self.transitions.iter().position(|t| t == name)
    }

    pub fn place_index(&self, name: &str) -> Option<usize> {
        self.places.iter().position(|p| p == name)
    }

    pub fn markings(&self) -> &[f64] {
        &self.markings
    }

    pub fn downstream(&self, place: usize) -> &[usize] {
        &self.downstream[place]
    }

    pub fn edges(&self) -> &[ProductionEdge] {
        &self.edges
    }

    pub(crate) fn place_inputs(&self, place: usize) -> impl Iterator<Item = &ProductionEdge> {
        self.inputs[place].iter().map(move |&i| &self.edges[i])
    }

    pub fn in_places(&self, transition: usize) -> &[usize] {
        &self.in_places[transition]
    }

    pub(crate) fn order(&self) -> &[usize] {
        &self.order
    }

    /// Dense production matrix `H` (`|P| × |Q|`), summing parallel edges.
    /// Same-step edges are included; use [`PetriNet::edges`] to tell them apart.
    pub fn production_matrix(&self) -> Vec<Vec<f64>> {
        let mut h = vec![vec![0.0; self.transitions.len()]; self.places.len()];
        for e in &self.edges {
            h[e.place][e.transition] += e.multiplicity;
        }
        h
    }

    /// Synchronization matrix `D` (`|Q| × |P|`): `D_qp = a_p` on edges `p → q`.
    pub fn synchronization_matrix(&self) -> MinPlusMatrix {
        let mut d = MinPlusMatrix::eps(self.transitions.len(), self.places.len());
        for (p, ds) in self.downstream.iter().enumerate() {
            for &q in ds {
                d[(q, p)] = ExtendedReal::from(self.markings[p]);
            }
        }
        d
    }

    pub fn validate_deterministic(&self) -> Determinism {
        let offending: Vec<(String, usize)> = self
            .downstream
            .iter()
            .enumerate()
            .filter(|(_, ds)| ds.len() != 1)
            .map(|(p, ds)| (self.places[p].clone(), ds.len()))
            .collect();
        Determinism {
            deterministic: offending.is_empty(),
            offending,
        }
    }

    pub fn is_deterministic(&self) -> bool {
        self.downstream.iter().all(|ds| ds.len() == 1)
    }

    /// Deterministic, unit multiplicities, one producer per place and no
    /// same-step edges: the dynamics are minplus linear.
    pub fn is_event_graph(&self) -> bool {
        self.is_deterministic()
            && self.inputs.iter().all(|ins| ins.len() == 1)
            && self.edges.iter().all(|e| e.multiplicity == 1.0 && e.lag == Lag::Previous)
    }
}

fn check_unique(names: &[String]) -> Result<(), PetriError> {
    let mut seen = HashMap::new();
    for n in names {
        if seen.insert(n.as_str(), ()).is_some() {
            return Err(PetriError::DuplicateId(n.clone()));
        }
    }
    Ok(())
}

/// Kahn order on transitions for the same-step dependency `q → q'` (an edge
/// `q → p` with lag 0 and `p → q'`). Ties go to the smallest index. On a cycle
/// returns the transitions left unordered.
fn same_step_order(nq: usize, edges: &[ProductionEdge], downstream: &[Vec<usize>]) -> Result<Vec<usize>, Vec<usize>> {
    let mut succ = vec![Vec::new(); nq];
    let mut indeg = vec![0usize; nq];
    for e in edges.iter().filter(|e| e.lag == Lag::Current) {
        for &q2 in &downstream[e.place] {
            succ[e.transition].push(q2);
            indeg[q2] += 1;
        }
    }
    let mut heap: BinaryHeap<Reverse<usize>> = (0..nq).filter(|&q| indeg[q] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(nq);
    while let Some(Reverse(q)) = heap.pop() {
        order.push(q);
        for &q2 in &succ[q] {
            indeg[q2] -= 1;
            if indeg[q2] == 0 {
                heap.push(Reverse(q2));
            }
        }
    }
    if order.len() == nq {
        Ok(order)
    } else {
        Err((0..nq).filter(|&q| indeg[q] > 0).collect())
    }
}
