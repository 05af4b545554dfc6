//! JSON descriptions of a group together with an endomorphism.
//!
//! ```json
//! {"type":"cyclic","n":27,"a":9}
//! {"type":"abelian","orders":[4,2],"matrix":[[0,2],[0,0]]}
//! {"type":"table","cayley":[[0,1],[1,0]],"map":[0,0]}
//! ```
//!
//! Matrix row `i` holds the `i`-th coordinates of the generator images. In a
//! table description element 0 must be the identity.

use serde::{Deserialize, Serialize};

use crate::dynamics::{Carrier, Endomorphism, Fdg};
use crate::error::{Error, Result};
use crate::group::{AbelianGroup, FiniteGroup, MatrixEndomorphism, TableEndomorphism, TableGroup};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum SystemSpec {
    Cyclic {
        n: u64,
        a: i64,
    },
    Abelian {
        orders: Vec<u64>,
        matrix: Vec<Vec<i64>>,
    },
    Table {
        cayley: Vec<Vec<usize>>,
        map: Vec<usize>,
    },
}

impl SystemSpec {
    pub fn from_json(text: &str) -> Result<SystemSpec> {
        serde_json::from_str(text).map_err(|e| Error::Spec(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }

    pub fn abelian(phi: &MatrixEndomorphism) -> SystemSpec {
        SystemSpec::Abelian {
            orders: phi.group().orders().to_vec(),
            matrix: phi.entries_signed(),
        }
    }

    pub fn table(group: &TableGroup, map: &[usize]) -> SystemSpec {
        SystemSpec::Table {
            cayley: group.cayley_rows(),
            map: map.to_vec(),
        }
    }

    /// Describes an existing system. Table groups whose identity is not
    /// element 0 cannot be described and yield `None`.
    pub fn describe(fdg: &Fdg) -> Option<SystemSpec> {
        match (fdg.carrier(), fdg.endomorphism()) {
            (_, Endomorphism::Matrix(phi)) => Some(SystemSpec::abelian(phi)),
            (Carrier::Table(g), Endomorphism::Table(f)) if g.identity() == 0 => {
                Some(SystemSpec::table(g, f.images()))
            }
            _ => None,
        }
    }

    /// Validates the description and builds the system.
    pub fn build(&self) -> Result<Fdg> {
        match self {
            SystemSpec::Cyclic { n, a } => Fdg::stretch(*n, *a),
            SystemSpec::Abelian { orders, matrix } => Ok(Fdg::from_matrix(
                MatrixEndomorphism::new(AbelianGroup::new(orders.clone())?, matrix.clone())?,
            )),
            SystemSpec::Table { cayley, map } => {
                let group = TableGroup::from_cayley(cayley)?;
                if group.identity() != 0 {
                    return Err(Error::InvalidTable(format!(
                        "element 0 is not the identity (identity is {})",
                        group.identity()
                    )));
                }
                let f = TableEndomorphism::new(&group, map.clone())?;
                Fdg::from_table(group, f)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::builtin_table_group;

    #[test]
    fn parse_and_build() {
        let f = SystemSpec::from_json(r#"{"type":"cyclic","n":27,"a":9}"#)
            .unwrap()
            .build()
            .unwrap();
        assert_eq!(f.order(), 27);
        assert_eq!(f.apply(2), 18);

        let s =
            SystemSpec::from_json(r#"{"type":"abelian","orders":[4,2],"matrix":[[0,2],[0,0]]}"#)
                .unwrap();
        let f = s.build().unwrap();
        assert_eq!(f.order(), 8);
        assert_eq!(SystemSpec::describe(&f).unwrap(), s);

        let s = SystemSpec::from_json(r#"{"type":"table","cayley":[[0,1],[1,0]],"map":[0,0]}"#)
            .unwrap();
        assert_eq!(s.build().unwrap().images(), &[0, 0]);
    }

    #[test]
    fn round_trip_through_json() {
        let s3 = builtin_table_group("S3").unwrap();
        let s = SystemSpec::table(&s3, &[0, 1, 1, 1, 0, 0]);
        let back = SystemSpec::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
        let f = back.build().unwrap();
        assert_eq!(f.nil_part().to_vec(), vec![0, 4, 5]);
    }

    #[test]
    fn rejects_bad_input() {
        let bad = |text: &str| {
            SystemSpec::from_json(text)
                .and_then(|s| s.build())
                .unwrap_err()
        };
        assert!(matches!(
            bad(r#"{"type":"cyclic","n":0,"a":1}"#),
            Error::Zero
        ));
        assert_eq!(
            bad(r#"{"type":"abelian","orders":[4,2],"matrix":[[0,1],[0,0]]}"#),
            Error::WellDefinednessViolation { row: 1, col: 2 }
        );
        assert!(matches!(
            bad(r#"{"type":"table","cayley":[[1,0],[0,1]],"map":[0,1]}"#),
            Error::InvalidTable(_)
        ));
        assert!(matches!(
            bad(r#"{"type":"table","cayley":[[0,1],[1,0]],"map":[1,1]}"#),
            Error::HomomorphismViolation { .. }
        ));
        assert!(matches!(bad(r#"{"type":"cyclic","n":3}"#), Error::Spec(_)));
        assert!(matches!(
            bad(r#"{"type":"ring","n":3,"a":1}"#),
            Error::Spec(_)
        ));
    }
}
