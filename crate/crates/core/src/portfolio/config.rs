use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Selection {
    /// Base vector is a random population member (DE/rand/1).
    Random,
    /// Base vector is the current best member (DE/best/1).
    Best,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Crossover {
    Binary,
    Exponential,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeConfig {
    pub name: String,
    pub cr: f64,
    pub f: f64,
    pub selection: Selection,
    pub crossover: Crossover,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialVelocity {
    Zero,
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsoConfig {
    pub name: String,
    pub initial_velocity: InitialVelocity,
    pub adaptive: bool,
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Algorithm {
    De(DeConfig),
    Pso(PsoConfig),
}

impl Algorithm {
    pub fn name(&self) -> &str {
        match self {
            Algorithm::De(c) => &c.name,
            Algorithm::Pso(c) => &c.name,
        }
    }
}

fn de(name: &str, cr: f64, f: f64, selection: Selection, crossover: Crossover) -> DeConfig {
    DeConfig {
        name: name.into(),
        cr,
        f,
        selection,
        crossover,
    }
}

fn pso(name: &str, initial_velocity: InitialVelocity, adaptive: bool, w: f64) -> PsoConfig {
    PsoConfig {
        name: name.into(),
        initial_velocity,
        adaptive,
        w,
    }
}

/// DE1..DE5.
pub fn de_configs() -> Vec<DeConfig> {
    use Crossover::*;
    use Selection::*;
    vec![
        de("DE1", 0.5, 0.5, Random, Binary),
        de("DE2", 0.6, 0.4, Best, Exponential),
        de("DE3", 0.9, 0.7, Best, Exponential),
        de("DE4", 0.3, 0.8, Best, Binary),
        de("DE5", 0.8, 0.4, Best, Binary),
    ]
}

/// PSO1..PSO5.
pub fn pso_configs() -> Vec<PsoConfig> {
    use InitialVelocity::*;
    vec![
        pso("PSO1", Zero, true, 0.9),
        pso("PSO2", Zero, false, 0.9),
        pso("PSO3", Random, true, 0.9),
        pso("PSO4", Random, false, 0.9),
        pso("PSO5", Random, false, 0.7),
    ]
}

pub fn algorithm_by_name(name: &str) -> Option<Algorithm> {
    de_configs()
        .into_iter()
        .map(Algorithm::De)
        .chain(pso_configs().into_iter().map(Algorithm::Pso))
        .find(|a| a.name() == name)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PortfolioName {
    #[serde(rename = "5DE")]
    FiveDe,
    #[serde(rename = "5PSO")]
    FivePso,
    #[serde(rename = "5DE+5PSO")]
    FiveDeFivePso,
    #[serde(rename = "2DE+2PSO")]
    TwoDeTwoPso,
}

impl PortfolioName {
    pub const ALL: [PortfolioName; 4] = [
        PortfolioName::FiveDe,
        PortfolioName::FivePso,
        PortfolioName::FiveDeFivePso,
        PortfolioName::TwoDeTwoPso,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PortfolioName::FiveDe => "5DE",
            PortfolioName::FivePso => "5PSO",
            PortfolioName::FiveDeFivePso => "5DE+5PSO",
            PortfolioName::TwoDeTwoPso => "2DE+2PSO",
        }
    }
}

impl fmt::Display for PortfolioName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PortfolioName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PortfolioName::ALL
            .into_iter()
            .find(|p| p.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Usage(format!("unknown portfolio {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Portfolio {
    pub name: PortfolioName,
    pub members: Vec<Algorithm>,
}

impl Portfolio {
    pub fn new(name: PortfolioName) -> Self {
        let des = de_configs().into_iter().map(Algorithm::De);
        let psos = pso_configs().into_iter().map(Algorithm::Pso);
        let members = match name {
            PortfolioName::FiveDe => des.collect(),
            PortfolioName::FivePso => psos.collect(),
            PortfolioName::FiveDeFivePso => des.chain(psos).collect(),
            PortfolioName::TwoDeTwoPso => ["DE2", "DE5", "PSO1", "PSO3"]
                .iter()
                .map(|n| algorithm_by_name(n).expect("named configuration exists"))
                .collect(),
        };
        Portfolio { name, members }
    }

    pub fn algorithm_names(&self) -> Vec<String> {
        self.members.iter().map(|a| a.name().to_string()).collect()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn de_table() {
        let t = de_configs();
        let rows: Vec<(f64, f64, Selection, Crossover)> =
            t.iter().map(|c| (c.cr, c.f, c.selection, c.crossover)).collect();
        use Crossover::*;
        use Selection::*;
        assert_eq!(
            rows,
            vec![
                (0.5, 0.5, Random, Binary),
                (0.6, 0.4, Best, Exponential),
                (0.9, 0.7, Best, Exponential),
                (0.3, 0.8, Best, Binary),
                (0.8, 0.4, Best, Binary),
            ]
        );
    }

    #[test]
    fn pso_table() {
        let t = pso_configs();
        use InitialVelocity::*;
        let rows: Vec<(InitialVelocity, bool, f64)> =
            t.iter().map(|c| (c.initial_velocity, c.adaptive, c.w)).collect();
        assert_eq!(
            rows,
            vec![
                (Zero, true, 0.9),
                (Zero, false, 0.9),
                (Random, true, 0.9),
                (Random, false, 0.9),
                (Random, false, 0.7),
            ]
        );
    }

    #[test]
    fn portfolio_membership() {
        assert_eq!(
            Portfolio::new(PortfolioName::TwoDeTwoPso).algorithm_names(),
            vec!["DE2", "DE5", "PSO1", "PSO3"]
        );
        assert_eq!(Portfolio::new(PortfolioName::FiveDeFivePso).len(), 10);
        assert_eq!("2de+2pso".parse::<PortfolioName>().unwrap(), PortfolioName::TwoDeTwoPso);
        assert!("3DE".parse::<PortfolioName>().is_err());
    }
}
