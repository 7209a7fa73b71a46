use serde::Serialize;
use thiserror::Error;

use super::FrameModel;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JsonError {
    #[error("PARSE_ERROR at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("UNKNOWN_FIELD `{field}` at line {line}, column {column}")]
    UnknownField {
        field: String,
        line: usize,
        column: usize,
    },
    #[error("SCHEMA_ERROR at line {line}, column {column}: {message}")]
    Schema {
        field: Option<String>,
        line: usize,
        column: usize,
        message: String,
    },
}

impl JsonError {
    pub fn code(&self) -> &'static str {
        match self {
            Self::Parse { .. } => "PARSE_ERROR",
            Self::UnknownField { .. } => "UNKNOWN_FIELD",
            Self::Schema { .. } => "SCHEMA_ERROR",
        }
    }
}

/// Pretty-printed JSON with a trailing newline. Key order follows struct
/// declaration order and floats use the shortest round-trip form, so equal
/// values always produce identical bytes.
pub fn to_canonical_json_value<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("IR types always serialize");
    text.push('\n');
    text
}

/// Serializes `model` with every array in canonical order.
pub fn to_canonical_json(model: &FrameModel) -> String {
    to_canonical_json_value(&model.clone().canonicalized())
}

pub fn from_json(text: &str) -> Result<FrameModel, JsonError> {
    serde_json::from_str(text).map_err(|e| {
        let (line, column) = (e.line(), e.column());
        let message = e.to_string();
        match e.classify() {
            serde_json::error::Category::Data => {
                let field = backticked(&message);
                if message.starts_with("unknown field") {
                    JsonError::UnknownField {
                        field: field.unwrap_or_default(),
                        line,
                        column,
                    }
                } else {
                    JsonError::Schema {
                        field: message
                            .starts_with("missing field")
                            .then_some(field)
                            .flatten(),
                        line,
                        column,
                        message,
                    }
                }
            }
            _ => JsonError::Parse {
                line,
                column,
                message,
            },
        }
    })
}

fn backticked(message: &str) -> Option<String> {
    let start = message.find('`')? + 1;
    let len = message[start..].find('`')?;
    Some(message[start..start + len].to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::portal;

    #[test]
    fn round_trip_is_identity() {
        let m = portal();
        assert_eq!(from_json(&to_canonical_json(&m)).unwrap(), m);
    }

    #[test]
    fn serialization_is_byte_stable() {
        let m = portal();
        assert_eq!(to_canonical_json(&m), to_canonical_json(&m.clone()));
    }

    #[test]
    fn canonical_order_ignores_input_order() {
        let m = portal();
        let mut shuffled = m.clone();
        shuffled.nodes.reverse();
        shuffled.elements.reverse();
        shuffled.sections.reverse();
        assert_eq!(to_canonical_json(&m), to_canonical_json(&shuffled));
    }

    #[test]
    fn top_level_keys_in_documented_order() {
        let text = to_canonical_json(&portal());
        let keys = [
            "\"units\"",
            "\"nodes\"",
            "\"supports\"",
            "\"sections\"",
            "\"elements\"",
            "\"point_loads\"",
            "\"distributed_loads\"",
            "\"provenance\"",
        ];
        let positions: Vec<_> = keys.iter().map(|k| text.find(k).unwrap()).collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn unknown_field_rejected() {
        let text = to_canonical_json(&portal()).replacen("\"nodes\"", "\"nodess\"", 1);
        match from_json(&text).unwrap_err() {
            JsonError::UnknownField { field, .. } => assert_eq!(field, "nodess"),
            other => panic!("expected UNKNOWN_FIELD, got {other}"),
        }
    }

    #[test]
    fn schema_and_parse_errors() {
        let text =
            to_canonical_json(&portal()).replacen("\"kind\": \"fixed\"", "\"kind\": \"hinged\"", 1);
        let err = from_json(&text).unwrap_err();
        assert_eq!(err.code(), "SCHEMA_ERROR", "{err}");

        let err = from_json("{\n  \"units\": ").unwrap_err();
        assert_eq!(err.code(), "PARSE_ERROR");
        let JsonError::Parse { line, .. } = err else {
            unreachable!()
        };
        assert_eq!(line, 2);

        let err = from_json("{}").unwrap_err();
        let JsonError::Schema { field, .. } = err else {
            panic!("expected schema error")
        };
        assert_eq!(field.as_deref(), Some("units"));
    }

    #[test]
    fn coordinate_ends_serialize_as_pairs() {
        let mut m = portal();
        m.elements[0].end_i = crate::model::ElementEnd::Point([0.0, 0.0]);
        let text = to_canonical_json(&m);
        assert_eq!(from_json(&text).unwrap(), m);
    }
}
