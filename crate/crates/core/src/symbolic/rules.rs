use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::DataError;
use crate::text::Relation;
use crate::tsv;

const BUILTIN: &str = include_str!("../../data/rules.tsv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Effect {
    /// Inverts the sign of the target's contextual valence.
    Flip,
    /// Sets the target's contextual valence to 0.
    Neutralize,
    /// Moves the dependent's valence onto the governor.
    Transfer,
}

impl Effect {
    pub fn as_str(self) -> &'static str {
        match self {
            Effect::Flip => "flip",
            Effect::Neutralize => "neutralize",
            Effect::Transfer => "transfer",
        }
    }
}

impl fmt::Display for Effect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Effect {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "flip" => Ok(Effect::Flip),
            "neutralize" => Ok(Effect::Neutralize),
            "transfer" => Ok(Effect::Transfer),
            _ => Err(format!("unknown effect `{s}`")),
        }
    }
}

/// What a rule matches on: a dependency relation, or a whole clause.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Trigger {
    Edge(Relation),
    Clause,
}

impl Trigger {
    /// Pass in which rules with this trigger run.
    fn phase(self) -> u8 {
        match self {
            Trigger::Clause => 0,
            Trigger::Edge(Relation::Amod) => 1,
            Trigger::Edge(_) => 2,
        }
    }
}

impl fmt::Display for Trigger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Trigger::Edge(r) => write!(f, "{r}"),
            Trigger::Clause => f.write_str("clause"),
        }
    }
}

impl FromStr for Trigger {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "clause" {
            Ok(Trigger::Clause)
        } else {
            s.parse().map(Trigger::Edge)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Condition {
    /// The clause contains `would`, `could`, `should` or `if`.
    Irrealis,
    /// The edge's dependent has a negative prior.
    DependentNegative,
    GovernorVerb,
    GovernorAdjNoun,
    Any,
}

impl Condition {
    pub fn as_str(self) -> &'static str {
        match self {
            Condition::Irrealis => "irrealis",
            Condition::DependentNegative => "dependent-negative",
            Condition::GovernorVerb => "governor-verb",
            Condition::GovernorAdjNoun => "governor-adj-noun",
            Condition::Any => "any",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Condition {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            Condition::Irrealis,
            Condition::DependentNegative,
            Condition::GovernorVerb,
            Condition::GovernorAdjNoun,
            Condition::Any,
        ]
        .into_iter()
        .find(|c| c.as_str() == s)
        .ok_or_else(|| format!("unknown condition `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValenceRule {
    pub id: String,
    pub trigger: Trigger,
    pub condition: Condition,
    pub effect: Effect,
}

/// An ordered, validated collection of rules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleSet {
    rules: Vec<ValenceRule>,
}

impl RuleSet {
    /// Reads `id<TAB>relation<TAB>condition<TAB>effect` lines.
    pub fn load<R: BufRead>(source: R) -> Result<Self, DataError> {
        let mut rules = Vec::new();
        let mut ids = HashSet::new();
        for rec in tsv::read_records(source)? {
            rec.expect_columns(4)?;
            let field = |i: usize| rec.fields[i].trim();
            let id = field(0);
            if id.is_empty() {
                return Err(DataError::line(rec.line, "empty rule id"));
            }
            if !ids.insert(id.to_owned()) {
                return Err(DataError::line(rec.line, format!("duplicate rule id `{id}`")));
            }
            let trigger: Trigger = field(1).parse().map_err(|e| DataError::line(rec.line, e))?;
            let condition: Condition = field(2).parse().map_err(|e| DataError::line(rec.line, e))?;
            let effect: Effect = field(3).parse().map_err(|e| DataError::line(rec.line, e))?;
            if (trigger == Trigger::Clause) != (condition == Condition::Irrealis) {
                return Err(DataError::line(
                    rec.line,
                    "the `irrealis` condition goes with the `clause` relation and only with it",
                ));
            }
            if trigger == Trigger::Clause && effect == Effect::Transfer {
                return Err(DataError::line(rec.line, "clause rules cannot transfer"));
            }
            rules.push(ValenceRule {
                id: id.to_owned(),
                trigger,
                condition,
                effect,
            });
        }
        // stable: file order is kept within a pass
        rules.sort_by_key(|r| r.trigger.phase());
        Ok(RuleSet { rules })
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, DataError> {
        Self::load(BufReader::new(File::open(path)?))
    }

    /// The four built-in rules: irrealis neutralization (R4), modifier flip
    /// (R1), verb negation (R2) and simple negation (R3).
    pub fn builtin() -> Self {
        Self::load(BUILTIN.as_bytes()).expect("built-in rules are valid")
    }

    pub fn empty() -> Self {
        RuleSet { rules: Vec::new() }
    }

    pub fn rules(&self) -> &[ValenceRule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

impl Default for RuleSet {
    fn default() -> Self {
        Self::builtin()
    }
}
