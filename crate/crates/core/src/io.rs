//! JSON system files.
//!
//! ```json
//! {"name": "g-bit", "measurements": [{"outcomes": 2}, {"outcomes": 2}],
//!  "vertices": [["1", "0", "1", "0"], ...]}
//! ```
//!
//! Tables are flat, setting-major and outcome-minor, with entries written as
//! `"p/q"` or integer strings. Box lists carry an optional `parties` count.

use serde::{Deserialize, Serialize};

use crate::composition::NsBox;
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::system::{GptSystem, State, SystemShape};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementSpec {
    pub outcomes: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub name: String,
    pub measurements: Vec<MeasurementSpec>,
    pub vertices: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parties: Option<usize>,
}

impl SystemFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }

    pub fn from_system(sys: &GptSystem) -> Self {
        SystemFile {
            name: sys.name().to_string(),
            measurements: sys
                .shape()
                .arities()
                .iter()
                .map(|&outcomes| MeasurementSpec { outcomes })
                .collect(),
            vertices: sys.vertices().iter().map(|v| table_strings(v.table())).collect(),
            parties: None,
        }
    }

    pub fn from_boxes(name: &str, boxes: &[NsBox]) -> Result<Self> {
        let parties = boxes
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty box list".into()))?
            .parties();
        let shape = NsBox::joint_shape(parties);
        Ok(SystemFile {
            name: name.to_string(),
            measurements: shape
                .arities()
                .iter()
                .map(|&outcomes| MeasurementSpec { outcomes })
                .collect(),
            vertices: boxes.iter().map(|b| table_strings(b.table())).collect(),
            parties: Some(parties),
        })
    }

    pub fn shape(&self) -> Result<SystemShape> {
        SystemShape::new(self.measurements.iter().map(|m| m.outcomes).collect())
    }

    /// Parsed vertex tables, each validated as a state.
    pub fn states(&self) -> Result<Vec<State>> {
        let shape = self.shape()?;
        self.vertices
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let table = row
                    .iter()
                    .enumerate()
                    .map(|(j, entry)| {
                        entry.parse::<Rational>().map_err(|e| {
                            Error::InvalidState(format!("vertex {i}, entry {j}: {e}"))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                State::new(shape.clone(), table)
                    .map_err(|e| Error::InvalidState(format!("vertex {i}: {e}")))
            })
            .collect()
    }

    pub fn to_system(&self) -> Result<GptSystem> {
        GptSystem::new(self.name.clone(), self.shape()?, self.states()?)
    }

    pub fn to_boxes(&self) -> Result<Vec<NsBox>> {
        let parties = self
            .parties
            .ok_or_else(|| Error::InvalidArgument(format!("{} is not a box list", self.name)))?;
        self.states()?
            .iter()
            .map(|s| NsBox::from_state(parties, s))
            .collect()
    }
}

fn table_strings(table: &[Rational]) -> Vec<String> {
    table.iter().map(Rational::to_string).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{make_gbit, make_hypercube};

    #[test]
    fn roundtrip() {
        for sys in [make_gbit(), make_hypercube(3).unwrap()] {
            let text = SystemFile::from_system(&sys).to_json();
            let back = SystemFile::parse(&text).unwrap().to_system().unwrap();
            assert_eq!(back.vertices(), sys.vertices());
            assert_eq!(back.name(), sys.name());
        }
    }

    #[test]
    fn parse_errors_have_positions() {
        match SystemFile::parse("{\n  \"name\": 3\n}") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        let bad = r#"{"name":"x","measurements":[{"outcomes":2}],"vertices":[["1/2","1/3"]]}"#;
        assert!(matches!(
            SystemFile::parse(bad).unwrap().to_system(),
            Err(Error::InvalidState(_))
        ));
    }
}
