//! JSON model files.
//!
//! Every document starts with a `format` tag and an integer `version`;
//! unknown keys are rejected. Probabilities are plain JSON numbers and are
//! written with shortest round-trip formatting, so reading back a written
//! model gives the identical model.
//!
//! MDP file:
//!
//! ```json
//! {
//!   "format": "prefplan-mdp", "version": 1,
//!   "states": ["s0", "s1", "sink"], "initial": "s0", "sink": "sink",
//!   "propositions": ["a"],
//!   "labels": { "s1": ["a"] },
//!   "transitions": [["s0", "go", "s1", 1.0], ["s1", "stop", "sink", 1.0]]
//! }
//! ```
//!
//! Unlisted non-sink states are labeled with the empty set.
//!
//! Preference automaton file:
//!
//! ```json
//! {
//!   "format": "prefplan-pdfa", "version": 1,
//!   "states": ["q0", "q1"], "initial": "q0", "propositions": ["a"],
//!   "alphabet": [[], ["a"]],
//!   "transitions": [["q0", ["a"], "q1"]],
//!   "default": null,
//!   "blocks": [{ "name": "done", "states": ["q1"] },
//!              { "name": "idle", "states": ["q0"] }],
//!   "edges": [["idle", "done"]]
//! }
//! ```
//!
//! With `default` set, missing transitions go to that state; otherwise the
//! table must be total. An edge `[from, to]` means `to` is preferred.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mdp::{Action, MemorylessPolicy, Tlmdp, TransitionSystem};
use crate::pdfa::{Pdfa, Symbol};
use crate::product::{ProductMdp, TerminalClass};

pub const VERSION: u32 = 1;
pub const MDP_FORMAT: &str = "prefplan-mdp";
pub const PDFA_FORMAT: &str = "prefplan-pdfa";
pub const PRODUCT_FORMAT: &str = "prefplan-product";
pub const POLICY_FORMAT: &str = "prefplan-policy";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MdpFile {
    pub format: String,
    pub version: u32,
    pub states: Vec<String>,
    pub initial: String,
    pub sink: String,
    #[serde(default)]
    pub propositions: Vec<String>,
    #[serde(default)]
    pub labels: BTreeMap<String, Vec<String>>,
    pub transitions: Vec<(String, String, String, f64)>,
}

impl MdpFile {
    pub fn from_model(m: &Tlmdp) -> Self {
        let names = m.states();
        let mut labels = BTreeMap::new();
        let mut transitions = Vec::with_capacity(m.num_transitions());
        for s in 0..m.num_states() {
            if let Some(sym) = m.label(s) {
                if !sym.is_empty() {
                    labels.insert(names[s].clone(), sym.props().map(str::to_string).collect());
                }
            }
            for a in m.actions(s) {
                for &(t, p) in &a.successors {
                    transitions.push((names[s].clone(), a.name.clone(), names[t].clone(), p));
                }
            }
        }
        MdpFile {
            format: MDP_FORMAT.into(),
            version: VERSION,
            states: names.to_vec(),
            initial: names[m.initial()].clone(),
            sink: names[m.sink()].clone(),
            propositions: m.propositions().to_vec(),
            labels,
            transitions,
        }
    }

    pub fn to_model(&self) -> Result<Tlmdp> {
        let mut b = Tlmdp::builder()
            .states(self.states.iter().cloned())
            .initial(self.initial.clone())
            .sink(self.sink.clone())
            .propositions(self.propositions.iter().cloned());
        for (s, props) in &self.labels {
            b = b.label(s.clone(), Symbol::new(props.iter().cloned()));
        }
        for (s, a, t, p) in &self.transitions {
            b = b.transition(s.clone(), a.clone(), t.clone(), *p);
        }
        b.build()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockEntry {
    pub name: String,
    pub states: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PdfaFile {
    pub format: String,
    pub version: u32,
    pub states: Vec<String>,
    pub initial: String,
    #[serde(default)]
    pub propositions: Vec<String>,
    pub alphabet: Vec<Vec<String>>,
    pub transitions: Vec<(String, Vec<String>, String)>,
    #[serde(default)]
    pub default: Option<String>,
    pub blocks: Vec<BlockEntry>,
    #[serde(default)]
    pub edges: Vec<(String, String)>,
}

impl PdfaFile {
    /// Writes the full transition table, so no default is needed.
    pub fn from_model(a: &Pdfa) -> Self {
        let names = a.states();
        let props = |s: &Symbol| s.props().map(str::to_string).collect::<Vec<_>>();
        let mut transitions = Vec::new();
        for q in 0..names.len() {
            for (k, sym) in a.alphabet().iter().enumerate() {
                transitions.push((names[q].clone(), props(sym), names[a.step_index(q, k)].clone()));
            }
        }
        PdfaFile {
            format: PDFA_FORMAT.into(),
            version: VERSION,
            states: names.to_vec(),
            initial: names[a.initial()].clone(),
            propositions: a.propositions().to_vec(),
            alphabet: a.alphabet().iter().map(props).collect(),
            transitions,
            default: None,
            blocks: a
                .blocks()
                .iter()
                .map(|b| BlockEntry {
                    name: b.name.clone(),
                    states: b.states.iter().map(|&q| names[q].clone()).collect(),
                })
                .collect(),
            edges: a
                .edges()
                .iter()
                .map(|&(i, j)| (a.blocks()[i].name.clone(), a.blocks()[j].name.clone()))
                .collect(),
        }
    }

    pub fn to_model(&self) -> Result<Pdfa> {
        let mut b = Pdfa::builder()
            .states(self.states.iter().cloned())
            .propositions(self.propositions.iter().cloned())
            .initial(self.initial.clone());
        for sym in &self.alphabet {
            b = b.symbol(Symbol::new(sym.iter().cloned()));
        }
        for (q, sym, r) in &self.transitions {
            b = b.transition(q.clone(), Symbol::new(sym.iter().cloned()), r.clone());
        }
        if let Some(d) = &self.default {
            b = b.default_state(d.clone());
        }
        for blk in &self.blocks {
            b = b.block(blk.name.clone(), blk.states.iter().cloned());
        }
        for (f, t) in &self.edges {
            b = b.edge(f.clone(), t.clone());
        }
        b.build()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionEntry {
    pub name: String,
    pub successors: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassEntry {
    pub name: String,
    pub states: Vec<usize>,
}

/// Product states are `[mdp state, automaton state]`; successors and class
/// members refer to positions in `states`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductFile {
    pub format: String,
    pub version: u32,
    pub states: Vec<(String, String)>,
    pub initial: usize,
    pub actions: Vec<Vec<ActionEntry>>,
    pub classes: Vec<ClassEntry>,
    /// Class names; `[from, to]` means `to` is preferred.
    pub edges: Vec<(String, String)>,
}

impl ProductFile {
    pub fn from_model(p: &ProductMdp) -> Self {
        ProductFile {
            format: PRODUCT_FORMAT.into(),
            version: VERSION,
            states: p.state_names().to_vec(),
            initial: p.initial(),
            actions: (0..p.num_states())
                .map(|x| {
                    p.actions(x)
                        .iter()
                        .map(|a| ActionEntry {
                            name: a.name.clone(),
                            successors: a.successors.clone(),
                        })
                        .collect()
                })
                .collect(),
            classes: p
                .classes()
                .iter()
                .map(|c| ClassEntry {
                    name: c.name.clone(),
                    states: c.states.clone(),
                })
                .collect(),
            edges: p
                .edges()
                .iter()
                .map(|&(i, j)| (p.classes()[i].name.clone(), p.classes()[j].name.clone()))
                .collect(),
        }
    }

    pub fn to_model(&self) -> Result<ProductMdp> {
        let n = self.states.len();
        if self.actions.len() != n {
            return Err(Error::InvalidModel(format!(
                "actions: {} entries for {} states",
                self.actions.len(),
                n
            )));
        }
        let class_index = |name: &str| {
            self.classes
                .iter()
                .position(|c| c.name == name)
                .ok_or_else(|| Error::InvalidModel(format!("edges: unknown class `{name}`")))
        };
        let edges = self
            .edges
            .iter()
            .map(|(f, t)| Ok((class_index(f)?, class_index(t)?)))
            .collect::<Result<Vec<_>>>()?;
        let mut actions = Vec::with_capacity(n);
        for (x, acts) in self.actions.iter().enumerate() {
            let mut list = Vec::with_capacity(acts.len());
            for a in acts {
                if let Some(&(t, _)) = a.successors.iter().find(|&&(t, _)| t >= n) {
                    return Err(Error::InvalidModel(format!(
                        "actions[{x}] `{}`: successor {t} out of range",
                        a.name
                    )));
                }
                list.push(Action {
                    name: a.name.clone(),
                    successors: a.successors.clone(),
                });
            }
            actions.push(list);
        }
        if self.initial >= n {
            return Err(Error::InvalidModel(format!("initial: {} out of range", self.initial)));
        }
        let classes = self
            .classes
            .iter()
            .map(|c| TerminalClass {
                name: c.name.clone(),
                states: c.states.clone(),
            })
            .collect();
        ProductMdp::from_parts(self.states.clone(), actions, self.initial, classes, edges)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyEntry {
    /// `[mdp state, automaton state]`.
    pub state: (String, String),
    /// `[action name, probability]` pairs.
    pub choice: Vec<(String, f64)>,
}

/// One entry per non-terminal product state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyFile {
    pub format: String,
    pub version: u32,
    pub states: Vec<PolicyEntry>,
}

impl PolicyFile {
    pub fn from_policy(p: &ProductMdp, pi: &MemorylessPolicy) -> Self {
        let states = (0..p.num_states())
            .filter(|&x| !p.is_terminal(x))
            .map(|x| PolicyEntry {
                state: p.state_names()[x].clone(),
                choice: pi
                    .choice(x)
                    .iter()
                    .map(|&(a, q)| (p.actions(x)[a].name.clone(), q))
                    .collect(),
            })
            .collect();
        PolicyFile {
            format: POLICY_FORMAT.into(),
            version: VERSION,
            states,
        }
    }

    pub fn to_policy(&self, p: &ProductMdp) -> Result<MemorylessPolicy> {
        let mut choice: Vec<Option<Vec<(usize, f64)>>> = vec![None; p.num_states()];
        for e in &self.states {
            let (s, q) = &e.state;
            let x = p
                .state_index(s, q)
                .ok_or_else(|| Error::InvalidPolicy(format!("unknown product state ({s},{q})")))?;
            let mut c = Vec::with_capacity(e.choice.len());
            for (name, prob) in &e.choice {
                let a = p.actions(x).iter().position(|a| &a.name == name).ok_or_else(|| {
                    Error::InvalidPolicy(format!("action `{name}` not available at ({s},{q})"))
                })?;
                c.push((a, *prob));
            }
            if choice[x].replace(c).is_some() {
                return Err(Error::InvalidPolicy(format!("state ({s},{q}) listed twice")));
            }
        }
        let mut out = Vec::with_capacity(p.num_states());
        for (x, c) in choice.into_iter().enumerate() {
            match c {
                Some(c) => out.push(c),
                None if p.is_terminal(x) => out.push(Vec::new()),
                None => {
                    return Err(Error::InvalidPolicy(format!(
                        "no choice for state {}",
                        p.state_name(x)
                    )))
                }
            }
        }
        let pi = MemorylessPolicy::new(out);
        pi.check(p)?;
        Ok(pi)
    }
}

/// Reads and deserializes a JSON document, checking its format tag and
/// version. Errors carry the path, the line and column, and the offending
/// field.
pub fn read_json<T: DeserializeOwned>(path: &Path, format: &str) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_json(&text, format).map_err(|message| Error::Parse {
        path: path.display().to_string(),
        message,
    })
}

/// Parses a JSON document of the given format.
pub fn parse_json<T: DeserializeOwned>(text: &str, format: &str) -> std::result::Result<T, String> {
    #[derive(Deserialize)]
    struct Header {
        format: Option<String>,
        version: Option<u32>,
    }
    let header: Header = serde_json::from_str(text).map_err(|e| e.to_string())?;
    match header.format.as_deref() {
        Some(f) if f == format => {}
        Some(f) => return Err(format!("format: expected `{format}`, found `{f}`")),
        None => return Err(format!("format: missing, expected `{format}`")),
    }
    match header.version {
        Some(VERSION) => {}
        Some(v) => return Err(format!("version: unsupported version {v}, expected {VERSION}")),
        None => return Err("version: missing".into()),
    }
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        format!("{path}: {inner}")
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    fs::write(path, text + "\n")?;
    Ok(())
}

/// Attaches the path and section to a model-construction error.
fn in_file<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Io(_) | Error::Parse { .. } => e,
        other => Error::Parse {
            path: path.display().to_string(),
            message: other.to_string(),
        },
    })
}

pub fn read_mdp(path: &Path) -> Result<Tlmdp> {
    let f: MdpFile = read_json(path, MDP_FORMAT)?;
    in_file(path, f.to_model())
}

pub fn read_pdfa(path: &Path) -> Result<Pdfa> {
    let f: PdfaFile = read_json(path, PDFA_FORMAT)?;
    in_file(path, f.to_model())
}

pub fn read_product(path: &Path) -> Result<ProductMdp> {
    let f: ProductFile = read_json(path, PRODUCT_FORMAT)?;
    in_file(path, f.to_model())
}

pub fn read_policy(path: &Path, product: &ProductMdp) -> Result<MemorylessPolicy> {
    let f: PolicyFile = read_json(path, POLICY_FORMAT)?;
    f.to_policy(product)
}

pub fn write_mdp(path: &Path, m: &Tlmdp) -> Result<()> {
    write_json(path, &MdpFile::from_model(m))
}

pub fn write_pdfa(path: &Path, a: &Pdfa) -> Result<()> {
    write_json(path, &PdfaFile::from_model(a))
}

pub fn write_product(path: &Path, p: &ProductMdp) -> Result<()> {
    write_json(path, &ProductFile::from_model(p))
}

pub fn write_policy(path: &Path, p: &ProductMdp, pi: &MemorylessPolicy) -> Result<()> {
    write_json(path, &PolicyFile::from_policy(p, pi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::product::build_product;
    use crate::scenarios::build_garden_mini;

    #[test]
    fn mini_models_round_trip() {
        let (m, a) = build_garden_mini("3x3").unwrap();
        let mf = MdpFile::from_model(&m);
        let text = serde_json::to_string(&mf).unwrap();
        let back: MdpFile = parse_json(&text, MDP_FORMAT).unwrap();
        assert_eq!(back.to_model().unwrap(), m);

        let pf = PdfaFile::from_model(&a);
        let text = serde_json::to_string(&pf).unwrap();
        let back: PdfaFile = parse_json(&text, PDFA_FORMAT).unwrap();
        assert_eq!(back.to_model().unwrap(), a);

        let p = build_product(&m, &a).unwrap();
        let back = ProductFile::from_model(&p).to_model().unwrap();
        assert_eq!(back.state_names(), p.state_names());
        assert_eq!(back.classes(), p.classes());
        assert_eq!(back.edges(), p.edges());
    }

    #[test]
    fn header_and_unknown_keys_are_checked() {
        let ok = r#"{"format":"prefplan-mdp","version":1,"states":["a","z"],"initial":"a","sink":"z","transitions":[]}"#;
        assert!(parse_json::<MdpFile>(ok, MDP_FORMAT).is_ok());
        let wrong = ok.replace("prefplan-mdp", "prefplan-pdfa");
        assert!(parse_json::<MdpFile>(&wrong, MDP_FORMAT).unwrap_err().contains("format"));
        let version = ok.replace("\"version\":1", "\"version\":7");
        assert!(parse_json::<MdpFile>(&version, MDP_FORMAT).unwrap_err().contains("version"));
        let extra = ok.replace("\"transitions\"", "\"bogus\":1,\"transitions\"");
        assert!(parse_json::<MdpFile>(&extra, MDP_FORMAT).unwrap_err().contains("bogus"));
        let bad = ok.replace("\"transitions\":[]", "\"transitions\":[[\"a\",\"go\",\"z\",\"half\"]]");
        let msg = parse_json::<MdpFile>(&bad, MDP_FORMAT).unwrap_err();
        assert!(msg.starts_with("transitions[0]"), "{msg}");
    }
}
