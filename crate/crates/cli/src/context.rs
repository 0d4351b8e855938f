use std::collections::BTreeMap;

use topmon::instances::InstanceParams;
use topmon::net::NetParams;
use topmon::SearchBound;

/// Everything a suite needs besides the instance.
#[derive(Debug, Clone)]
pub struct Ctx {
    pub params: NetParams,
    pub degree: u32,
    pub max_factors: usize,
    pub instance: InstanceParams,
}

impl Ctx {
    pub fn bound(&self) -> SearchBound {
        self.params.bound(self.degree)
    }

    pub fn settings(&self) -> BTreeMap<String, String> {
        let p = &self.params;
        [
            ("window", p.window.to_string()),
            ("degree", self.degree.to_string()),
            ("depth", p.depth.to_string()),
            ("level", p.level.0.to_string()),
            ("seed", p.seed.to_string()),
            ("qmax", p.qmax.to_string()),
            ("max-factors", self.max_factors.to_string()),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
    }
}
