//! The pollinator-robot garden.
//!
//! A bee robot moves on a grid holding three kinds of flowers. A bird walks
//! over part of the garden and, when it shares the robot's cell, pins the
//! robot in place for that step. Rain may start and stop; the robot cannot
//! pollinate while it rains. The battery allows a fixed number of steps,
//! after which the episode terminates.
//!
//! A state is labeled with the flower type under the robot whenever that
//! flower can be pollinated there (dry weather, no bird). The preference
//! automaton reads those labels:
//!
//! - `p1`: tulips first, then at least one other type;
//! - `p2`: daisies or orchids first, then a second type;
//! - `p3`: only tulips;
//! - `p4`: at most one of daisies and orchids.
//!
//! `p1` is best, `p4` is worst, and `p2`, `p3` are incomparable.
//!
//! Cells are `(x, y)` with `x` growing east and `y` growing north; `(0, 0)`
//! is the bottom-left corner.

use std::collections::HashMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mdp::Tlmdp;
use crate::pdfa::{Pdfa, Symbol};

pub type Cell = (usize, usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flower {
    Tulip,
    Daisy,
    Orchid,
}

impl Flower {
    pub const ALL: [Flower; 3] = [Flower::Tulip, Flower::Daisy, Flower::Orchid];

    pub fn name(self) -> &'static str {
        match self {
            Flower::Tulip => "tulip",
            Flower::Daisy => "daisy",
            Flower::Orchid => "orchid",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Move {
    N,
    S,
    E,
    W,
    T,
}

impl Move {
    pub const ALL: [Move; 5] = [Move::N, Move::S, Move::E, Move::W, Move::T];

    fn delta(self) -> (isize, isize) {
        match self {
            Move::N => (0, 1),
            Move::S => (0, -1),
            Move::E => (1, 0),
            Move::W => (-1, 0),
            Move::T => (0, 0),
        }
    }

    /// The two perpendicular directions.
    fn laterals(self) -> [Move; 2] {
        match self {
            Move::N | Move::S => [Move::E, Move::W],
            Move::E | Move::W => [Move::N, Move::S],
            Move::T => [Move::T, Move::T],
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "mode")]
pub enum Actuation {
    Deterministic,
    /// Intended direction with `success`, each perpendicular direction with
    /// `slip`, staying put with the rest. Never the opposite direction.
    Stochastic { success: f64, slip: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BirdConfig {
    /// Cells the bird may occupy. Empty means there is no bird.
    pub region: Vec<Cell>,
    /// Defaults to the first region cell.
    #[serde(default)]
    pub start: Option<Cell>,
    /// Probability of staying put; the rest is spread over the region
    /// neighbours.
    #[serde(default = "default_bird_stay")]
    pub stay: f64,
    /// When set, neighbour weights are drawn at random from this seed
    /// instead of being uniform.
    #[serde(default)]
    pub seed: Option<u64>,
}

fn default_bird_stay() -> f64 {
    0.25
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RainConfig {
    /// After `d` dry steps the chance of rain next step is
    /// `min(1, onset_increment * (d + 1))`.
    pub onset_increment: f64,
    /// Chance that rain stops on the k-th step after it started; the last
    /// entry repeats.
    pub stop_schedule: Vec<f64>,
}

impl Default for RainConfig {
    fn default() -> Self {
        RainConfig {
            onset_increment: 0.2,
            stop_schedule: vec![0.2, 0.4, 0.6, 0.8, 1.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GardenConfig {
    pub width: usize,
    pub height: usize,
    pub flowers: Vec<(Cell, Flower)>,
    #[serde(default = "default_start")]
    pub start: Cell,
    /// Steps the battery allows.
    pub horizon: usize,
    #[serde(default = "default_moves")]
    pub actions: Vec<Move>,
    pub actuation: Actuation,
    #[serde(default)]
    pub bird: Option<BirdConfig>,
    #[serde(default)]
    pub rain: Option<RainConfig>,
}

fn default_start() -> Cell {
    (0, 0)
}

fn default_moves() -> Vec<Move> {
    Move::ALL.to_vec()
}

impl GardenConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        let inside = |c: Cell| c.0 < self.width && c.1 < self.height;
        if self.width == 0 || self.height == 0 {
            return bad("grid must have at least one cell".into());
        }
        if self.horizon == 0 {
            return bad("horizon must be at least 1".into());
        }
        if !inside(self.start) {
            return bad(format!("start {:?} outside the grid", self.start));
        }
        if self.actions.is_empty() {
            return bad("no robot actions".into());
        }
        for (k, m) in self.actions.iter().enumerate() {
            if self.actions[..k].contains(m) {
                return bad(format!("action {m} listed twice"));
            }
        }
        for (k, &(c, f)) in self.flowers.iter().enumerate() {
            if !inside(c) {
                return bad(format!("{} at {c:?} outside the grid", f.name()));
            }
            if self.flowers[..k].iter().any(|&(d, _)| d == c) {
                return bad(format!("two flowers at {c:?}"));
            }
        }
        if let Actuation::Stochastic { success, slip } = self.actuation {
            if !(0.0..=1.0).contains(&success) || !(0.0..=1.0).contains(&slip) || success + 2.0 * slip > 1.0 + 1e-12
            {
                return bad(format!("actuation probabilities {success} + 2 x {slip} exceed 1"));
            }
        }
        if let Some(b) = &self.bird {
            if let Some(c) = b.region.iter().find(|&&c| !inside(c)) {
                return bad(format!("bird cell {c:?} outside the grid"));
            }
            if let Some(s) = b.start {
                if !b.region.contains(&s) {
                    return bad(format!("bird start {s:?} outside its region"));
                }
            }
            if !(0.0..=1.0).contains(&b.stay) {
                return bad(format!("bird stay probability {} outside [0, 1]", b.stay));
            }
        }
        if let Some(r) = &self.rain {
            if !(r.onset_increment > 0.0 && r.onset_increment <= 1.0) {
                return bad(format!("rain onset increment {} outside (0, 1]", r.onset_increment));
            }
            if r.stop_schedule.is_empty() || r.stop_schedule.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return bad("rain stop schedule must be non-empty probabilities".into());
            }
        }
        Ok(())
    }

    fn flower_at(&self, c: Cell) -> Option<Flower> {
        self.flowers.iter().find(|&&(d, _)| d == c).map(|&(_, f)| f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Weather {
    /// Dry for this many steps since the last rain (capped).
    Dry(u8),
    /// Raining for this many steps (capped).
    Wet(u8),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct GardenState {
    robot: Cell,
    bird: Option<Cell>,
    weather: Weather,
    battery: usize,
}

impl GardenState {
    fn name(&self) -> String {
        let bird = match self.bird {
            Some((x, y)) => format!("b{x}.{y}"),
            None => "b-".into(),
        };
        let weather = match self.weather {
            Weather::Dry(d) => format!("d{d}"),
            Weather::Wet(k) => format!("w{k}"),
        };
        format!("r{}.{}-{bird}-{weather}-e{}", self.robot.0, self.robot.1, self.battery)
    }
}

pub const SINK: &str = "done";

fn weather_step(rain: Option<&RainConfig>, w: Weather) -> Vec<(Weather, f64)> {
    let Some(r) = rain else {
        return vec![(w, 1.0)];
    };
    let split = |p: f64, yes: Weather, no: Weather| {
        if p >= 1.0 {
            vec![(yes, 1.0)]
        } else if p <= 0.0 {
            vec![(no, 1.0)]
        } else {
            vec![(yes, p), (no, 1.0 - p)]
        }
    };
    match w {
        Weather::Dry(d) => {
            let p = (r.onset_increment * (d as f64 + 1.0)).min(1.0);
            split(p, Weather::Wet(0), Weather::Dry(d + 1))
        }
        Weather::Wet(k) => {
            let last = r.stop_schedule.len() - 1;
            let p = r.stop_schedule[(k as usize).min(last)];
            split(p, Weather::Dry(0), Weather::Wet((k + 1).min(last as u8)))
        }
    }
}

fn bird_chain(cfg: &BirdConfig) -> HashMap<Cell, Vec<(Cell, f64)>> {
    let mut rng = cfg.seed.map(ChaCha8Rng::seed_from_u64);
    let mut chain = HashMap::new();
    for &c in &cfg.region {
        let nbrs: Vec<Cell> = cfg
            .region
            .iter()
            .copied()
            .filter(|&d| c.0.abs_diff(d.0) + c.1.abs_diff(d.1) == 1)
            .collect();
        let row = if nbrs.is_empty() {
            vec![(c, 1.0)]
        } else {
            let weights: Vec<f64> = match rng.as_mut() {
                Some(r) => nbrs.iter().map(|_| r.random_range(0.1..1.0)).collect(),
                None => vec![1.0; nbrs.len()],
            };
            let total: f64 = weights.iter().sum();
            let mut row = vec![(c, cfg.stay)];
            row.extend(nbrs.iter().zip(&weights).map(|(&d, w)| (d, (1.0 - cfg.stay) * w / total)));
            row.retain(|&(_, p)| p > 0.0);
            row
        };
        chain.insert(c, row);
    }
    chain
}

fn robot_step(cfg: &GardenConfig, at: Cell, m: Move) -> Vec<(Cell, f64)> {
    let go = |m: Move| -> Cell {
        let (dx, dy) = m.delta();
        let x = at.0 as isize + dx;
        let y = at.1 as isize + dy;
        if x < 0 || y < 0 || x >= cfg.width as isize || y >= cfg.height as isize {
            at
        } else {
            (x as usize, y as usize)
        }
    };
    match (cfg.actuation, m) {
        (Actuation::Deterministic, _) | (_, Move::T) => vec![(go(m), 1.0)],
        (Actuation::Stochastic { success, slip }, _) => {
            let [l, r] = m.laterals();
            vec![
                (go(m), success),
                (go(l), slip),
                (go(r), slip),
                (at, 1.0 - success - 2.0 * slip),
            ]
        }
    }
}

/// Builds the garden MDP and its preference automaton.
pub fn build_garden(cfg: &GardenConfig) -> Result<(Tlmdp, Pdfa)> {
    cfg.validate()?;
    let chain = cfg.bird.as_ref().filter(|b| !b.region.is_empty()).map(bird_chain);
    let bird0 = cfg
        .bird
        .as_ref()
        .and_then(|b| b.start.or_else(|| b.region.first().copied()));
    let start = GardenState {
        robot: cfg.start,
        bird: bird0,
        weather: Weather::Dry(0),
        battery: cfg.horizon,
    };

    let mut index: HashMap<GardenState, usize> = HashMap::new();
    let mut states = vec![start];
    index.insert(start, 0);
    let mut builder = Tlmdp::builder()
        .initial(start.name())
        .sink(SINK)
        .propositions(Flower::ALL.iter().map(|f| f.name()));
    let mut k = 0;
    while k < states.len() {
        let s = states[k];
        k += 1;
        let name = s.name();
        if let Some(f) = cfg.flower_at(s.robot) {
            if matches!(s.weather, Weather::Dry(_)) && s.bird != Some(s.robot) {
                builder = builder.label(name.clone(), Symbol::new([f.name()]));
            }
        }
        for &m in &cfg.actions {
            if s.battery == 1 {
                builder = builder.transition(name.clone(), m.to_string(), SINK, 1.0);
                continue;
            }
            let robot = if s.bird == Some(s.robot) {
                vec![(s.robot, 1.0)]
            } else {
                robot_step(cfg, s.robot, m)
            };
            let bird = match (s.bird, &chain) {
                (Some(b), Some(c)) => c[&b].iter().map(|&(d, p)| (Some(d), p)).collect(),
                _ => vec![(None, 1.0)],
            };
            let weather = weather_step(cfg.rain.as_ref(), s.weather);
            for &(r, pr) in &robot {
                if pr <= 0.0 {
                    continue;
                }
                for &(b, pb) in &bird {
                    for &(w, pw) in &weather {
                        let t = GardenState {
                            robot: r,
                            bird: b,
                            weather: w,
                            battery: s.battery - 1,
                        };
                        if !index.contains_key(&t) {
                            index.insert(t, states.len());
                            states.push(t);
                        }
                        builder = builder.transition(name.clone(), m.to_string(), t.name(), pr * pb * pw);
                    }
                }
            }
        }
    }
    let mdp = builder
        .states(states.iter().map(GardenState::name))
        .state(SINK)
        .build()?;
    Ok((mdp, garden_pdfa()?))
}

/// The six-state automaton over single-flower observations with blocks
/// `p1 = {q2}`, `p2 = {q4}`, `p3 = {q1}`, `p4 = {q0, q3, q5}`.
pub fn garden_pdfa() -> Result<Pdfa> {
    let t = Symbol::new(["tulip"]);
    let d = Symbol::new(["daisy"]);
    let o = Symbol::new(["orchid"]);
    let e = Symbol::empty();
    let mut b = Pdfa::builder()
        .states(["q0", "q1", "q2", "q3", "q4", "q5"])
        .propositions(Flower::ALL.iter().map(|f| f.name()))
        .symbol(e.clone())
        .symbol(t.clone())
        .symbol(d.clone())
        .symbol(o.clone())
        .initial("q0");
    let moves = [
        ("q0", &t, "q1"),
        ("q0", &d, "q3"),
        ("q0", &o, "q5"),
        ("q1", &d, "q2"),
        ("q1", &o, "q2"),
        ("q3", &t, "q4"),
        ("q3", &o, "q4"),
        ("q5", &t, "q4"),
        ("q5", &d, "q4"),
    ];
    for q in ["q0", "q1", "q2", "q3", "q4", "q5"] {
        for sym in [&e, &t, &d, &o] {
            let to = moves
                .iter()
                .find(|(from, s, _)| *from == q && *s == sym)
                .map_or(q, |m| m.2);
            b = b.transition(q, sym.clone(), to);
        }
    }
    b.block("p1", ["q2"])
        .block("p2", ["q4"])
        .block("p3", ["q1"])
        .block("p4", ["q0", "q3", "q5"])
        .edge("p4", "p2")
        .edge("p4", "p3")
        .edge("p2", "p1")
        .edge("p3", "p1")
        .build()
}

pub const MINI_PRESETS: [&str; 2] = ["3x3", "4x4"];
pub const PRESETS: [&str; 4] = ["3x3", "4x4", "full", "full-stochastic"];

/// Named configurations.
///
/// - `3x3`: moves `N`, `E`, `T`, three steps, stochastic actuation, no bird
///   or rain; twelve decision states in the product, small enough for
///   exhaustive policy enumeration.
/// - `4x4`: all moves, six steps, bird, rain and stochastic actuation.
/// - `full`, `full-stochastic`: the full-size garden with a twelve-step
///   battery, deterministic or stochastic actuation.
pub fn preset(name: &str) -> Result<GardenConfig> {
    use Flower::*;
    let cfg = match name {
        "3x3" => GardenConfig {
            width: 3,
            height: 3,
            flowers: vec![((2, 0), Tulip), ((0, 1), Daisy), ((1, 1), Orchid)],
            start: (0, 0),
            horizon: 3,
            actions: vec![Move::N, Move::E, Move::T],
            actuation: Actuation::Stochastic {
                success: 0.7,
                slip: 0.1,
            },
            bird: None,
            rain: None,
        },
        "4x4" => GardenConfig {
            width: 4,
            height: 4,
            flowers: vec![((2, 0), Tulip), ((0, 2), Daisy), ((2, 2), Orchid), ((3, 1), Tulip)],
            start: (0, 0),
            horizon: 6,
            actions: Move::ALL.to_vec(),
            actuation: Actuation::Stochastic {
                success: 0.7,
                slip: 0.1,
            },
            bird: Some(BirdConfig {
                region: vec![(3, 0), (3, 1)],
                start: None,
                stay: 0.25,
                seed: None,
            }),
            rain: Some(RainConfig::default()),
        },
        "full" | "full-stochastic" => GardenConfig {
            width: 6,
            height: 6,
            flowers: vec![
                ((2, 0), Tulip),
                ((5, 3), Tulip),
                ((0, 3), Daisy),
                ((3, 5), Daisy),
                ((2, 2), Orchid),
                ((5, 5), Orchid),
            ],
            start: (0, 0),
            horizon: 12,
            actions: Move::ALL.to_vec(),
            actuation: if name == "full" {
                Actuation::Deterministic
            } else {
                Actuation::Stochastic {
                    success: 0.7,
                    slip: 0.1,
                }
            },
            bird: Some(BirdConfig {
                region: vec![(4, 0), (5, 0), (4, 1), (5, 1)],
                start: None,
                stay: 0.25,
                seed: None,
            }),
            rain: Some(RainConfig::default()),
        },
        _ => {
            return Err(Error::InvalidConfig(format!(
                "unknown preset `{name}`; known presets: {}",
                PRESETS.join(", ")
            )))
        }
    };
    Ok(cfg)
}

/// One of the desk-scale presets.
pub fn build_garden_mini(name: &str) -> Result<(Tlmdp, Pdfa)> {
    if !MINI_PRESETS.contains(&name) {
        return Err(Error::InvalidConfig(format!(
            "unknown mini preset `{name}`; known presets: {}",
            MINI_PRESETS.join(", ")
        )));
    }
    build_garden(&preset(name)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::TransitionSystem;
    use crate::pdfa::WordComparison;

    #[test]
    fn rain_onset_and_stop_schedules() {
        let r = RainConfig::default();
        let onset: Vec<f64> = (0..6)
            .map(|d| {
                weather_step(Some(&r), Weather::Dry(d))
                    .iter()
                    .find(|(w, _)| *w == Weather::Wet(0))
                    .map_or(0.0, |x| x.1)
            })
            .collect();
        for (got, want) in onset.iter().zip([0.2, 0.4, 0.6, 0.8, 1.0, 1.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        let stop: Vec<f64> = (0..5)
            .map(|k| {
                weather_step(Some(&r), Weather::Wet(k))
                    .iter()
                    .find(|(w, _)| *w == Weather::Dry(0))
                    .map_or(0.0, |x| x.1)
            })
            .collect();
        assert_eq!(stop, vec![0.2, 0.4, 0.6, 0.8, 1.0]);
    }

    #[test]
    fn stochastic_actuation_rows() {
        let mut cfg = preset("3x3").unwrap();
        cfg.actuation = Actuation::Stochastic {
            success: 0.7,
            slip: 0.1,
        };
        let row = robot_step(&cfg, (1, 1), Move::N);
        assert_eq!(row, vec![((1, 2), 0.7), ((2, 1), 0.1), ((0, 1), 0.1), ((1, 1), 1.0 - 0.7 - 0.2)]);
        // Bottom-left corner: W and S slips bounce back.
        let row = robot_step(&cfg, (0, 0), Move::E);
        assert_eq!(row[0], ((1, 0), 0.7));
        assert_eq!(row[1], ((0, 1), 0.1));
        assert_eq!(row[2], ((0, 0), 0.1));
        assert!((row.iter().map(|r| r.1).sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn garden_automaton_matches_outcomes() {
        let a = garden_pdfa().unwrap();
        let t = Symbol::new(["tulip"]);
        let d = Symbol::new(["daisy"]);
        let o = Symbol::new(["orchid"]);
        let class = |w: &[Symbol]| a.blocks()[a.class_of_index(a.run(w).unwrap())].name.clone();
        assert_eq!(class(&[t.clone(), o.clone()]), "p1");
        assert_eq!(class(&[d.clone(), t.clone()]), "p2");
        assert_eq!(class(&[o.clone(), d.clone()]), "p2");
        assert_eq!(class(&[t.clone(), t.clone()]), "p3");
        assert_eq!(class(&[d.clone(), d.clone()]), "p4");
        assert_eq!(class(&[]), "p4");
        assert_eq!(a.compare_words(&[t.clone(), d.clone()], &[t.clone()]).unwrap(), WordComparison::FirstPreferred);
        assert_eq!(a.compare_words(&[d, t.clone()], &[t]).unwrap(), WordComparison::Incomparable);
    }

    #[test]
    fn mini_presets_validate() {
        for name in MINI_PRESETS {
            let (m, _) = build_garden_mini(name).unwrap();
            let report = m.validate();
            assert!(report.is_valid(), "{name}: {report}");
        }
        assert!(build_garden_mini("full").is_err());
        assert!(preset("nope").unwrap_err().to_string().contains("3x3"));
    }

    #[test]
    fn bird_pins_the_robot() {
        let cfg = GardenConfig {
            width: 2,
            height: 1,
            flowers: vec![((1, 0), Flower::Tulip)],
            start: (1, 0),
            horizon: 2,
            actions: vec![Move::W],
            actuation: Actuation::Deterministic,
            bird: Some(BirdConfig {
                region: vec![(1, 0)],
                start: None,
                stay: 0.25,
                seed: None,
            }),
            rain: None,
        };
        let (m, _) = build_garden(&cfg).unwrap();
        let s0 = m.initial();
        // Blocked from moving and from pollinating.
        assert_eq!(m.label(s0), Some(&Symbol::empty()));
        let a = &m.actions(s0)[0];
        assert_eq!(a.successors.len(), 1);
        assert_eq!(m.states()[a.successors[0].0], "r1.0-b1.0-d0-e1");
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut cfg = preset("3x3").unwrap();
        cfg.horizon = 0;
        assert!(build_garden(&cfg).is_err());
        let mut cfg = preset("3x3").unwrap();
        cfg.flowers.push(((5, 5), Flower::Daisy));
        assert!(build_garden(&cfg).is_err());
        let mut cfg = preset("3x3").unwrap();
        cfg.actuation = Actuation::Stochastic {
            success: 0.9,
            slip: 0.1,
        };
        assert!(build_garden(&cfg).is_err());
    }
}
