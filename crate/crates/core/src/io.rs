//! JSON documents exchanged by the command line tools. Periods and products
//! are 1-based on disk and 0-based in memory.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{PlpError, Result};
use crate::exact::OracleResult;
use crate::generate::{GeneratedInstance, GeneratorInfo};
use crate::model::{validate_instance, Diagnostic, Instance, Order, Product, Solution, Weights};
use crate::objective::ObjectiveBreakdown;

fn default_weights() -> [f64; 3] {
    Weights::default().as_array()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductDoc {
    pub name: String,
    pub capacity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrderDoc {
    pub id: u64,
    pub demand: u64,
    pub priority: u32,
    pub product: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    pub num_periods: usize,
    pub capacity_total: f64,
    pub products: Vec<ProductDoc>,
    pub orders: Vec<OrderDoc>,
    #[serde(default = "default_weights")]
    pub weights: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionDoc {
    pub assignment: Vec<usize>,
}

/// Written next to a generated instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SidecarDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Vec<usize>>,
    pub generator: GeneratorInfo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleDoc {
    pub assignment: Vec<usize>,
    pub total: f64,
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
    pub violations: u64,
    pub proven: bool,
    pub explored: u64,
}

impl From<&Instance> for InstanceDoc {
    fn from(inst: &Instance) -> Self {
        Self {
            num_periods: inst.num_periods,
            capacity_total: inst.capacity_total,
            products: inst
                .products
                .iter()
                .map(|p| ProductDoc {
                    name: p.name.clone(),
                    capacity: p.capacity,
                })
                .collect(),
            orders: inst
                .orders
                .iter()
                .map(|o| OrderDoc {
                    id: o.id,
                    demand: o.demand,
                    priority: o.priority,
                    product: o.product as i64 + 1,
                })
                .collect(),
            weights: inst.weights.as_array(),
        }
    }
}

impl InstanceDoc {
    /// Converts to an [`Instance`], rejecting it with every diagnostic found.
    pub fn into_instance(self) -> Result<Instance> {
        let m = self.products.len() as i64;
        let mut diags = Vec::new();
        let orders = self
            .orders
            .iter()
            .enumerate()
            .map(|(j, o)| {
                let product = if (1..=m).contains(&o.product) {
                    (o.product - 1) as usize
                } else {
                    diags.push(Diagnostic::ProductOutOfRange {
                        order: j + 1,
                        product: o.product,
                    });
                    0
                };
                Order {
                    id: o.id,
                    demand: o.demand,
                    priority: o.priority,
                    product,
                }
            })
            .collect();
        let [a1, a2, a3] = self.weights;
        let instance = Instance {
            orders,
            num_periods: self.num_periods,
            products: self
                .products
                .into_iter()
                .map(|p| Product {
                    name: p.name,
                    capacity: p.capacity,
                })
                .collect(),
            capacity_total: self.capacity_total,
            weights: Weights::new(a1, a2, a3),
        };
        diags.extend(validate_instance(&instance));
        if diags.is_empty() {
            Ok(instance)
        } else {
            Err(PlpError::InvalidInstance(diags))
        }
    }
}

impl From<&Solution> for SolutionDoc {
    fn from(s: &Solution) -> Self {
        Self {
            assignment: s.to_one_based(),
        }
    }
}

impl SolutionDoc {
    pub fn into_solution(self) -> Result<Solution> {
        Solution::from_one_based(&self.assignment)
    }
}

impl From<&GeneratedInstance> for SidecarDoc {
    fn from(g: &GeneratedInstance) -> Self {
        Self {
            certificate: g.certificate.as_ref().map(Solution::to_one_based),
            generator: g.generator.clone(),
        }
    }
}

impl From<&OracleResult> for OracleDoc {
    fn from(r: &OracleResult) -> Self {
        Self {
            assignment: r.optimal.to_one_based(),
            total: r.value.total,
            g1: r.value.g1,
            g2: r.value.g2,
            g3: r.value.g3,
            violations: r.value.violations,
            proven: r.proven,
            explored: r.explored,
        }
    }
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    serde_json::from_str::<InstanceDoc>(text)?.into_instance()
}

pub fn parse_solution(text: &str) -> Result<Solution> {
    serde_json::from_str::<SolutionDoc>(text)?.into_solution()
}

pub fn instance_to_json(instance: &Instance) -> Result<String> {
    Ok(serde_json::to_string_pretty(&InstanceDoc::from(instance))?)
}

pub fn solution_to_json(solution: &Solution) -> Result<String> {
    Ok(serde_json::to_string(&SolutionDoc::from(solution))?)
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    parse_instance(&fs::read_to_string(path)?)
}

pub fn read_solution(path: &Path) -> Result<Solution> {
    parse_solution(&fs::read_to_string(path)?)
}

/// Reads the certificate of a generator sidecar file.
pub fn read_certificate(path: &Path) -> Result<Solution> {
    let doc: SidecarDoc = serde_json::from_str(&fs::read_to_string(path)?)?;
    let cert = doc
        .certificate
        .ok_or_else(|| PlpError::InvalidParameter(format!("{} holds no certificate", path.display())))?;
    Solution::from_one_based(&cert)
}

/// Breakdown with its solution, as written by `solve`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub assignment: Vec<usize>,
    pub objective: String,
    pub breakdown: ObjectiveBreakdown,
}
