use std::fs;

use anyhow::{bail, Context, Result};

use portrait_growth::branch::{
    apollonian_branch_data, grigorchuk_branch_data, iterate_growth, BranchData, APOLLONIAN_LEVEL, GRIGORCHUK_LEVEL,
};
use portrait_growth::catalog::{apollonian, ggs, grigorchuk, GgsVector};
use portrait_growth::families::{apollonian_growth, ggs_growth, grigorchuk_growth};
use portrait_growth::series::GrowthSeries;
use portrait_growth::GroupSpec;

use crate::{Catalog, Engine, GroupArgs};

/// A resolved `--group` / `--spec` selection.
pub enum Group {
    Grigorchuk,
    Ggs(GgsVector),
    Apollonian,
    Custom(GroupSpec),
}

impl Group {
    pub fn resolve(args: &GroupArgs) -> Result<Group> {
        match (&args.group, &args.spec) {
            (Some(Catalog::Grigorchuk), _) => Ok(Group::Grigorchuk),
            (Some(Catalog::Apollonian), _) => Ok(Group::Apollonian),
            (Some(Catalog::Ggs), _) => {
                let e = GgsVector::new(args.p, args.e.clone())?;
                if e.is_symmetric() {
                    bail!("GGS vector {:?} is symmetric; only non-symmetric vectors are supported", e.e());
                }
                Ok(Group::Ggs(e))
            }
            (None, Some(path)) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                Ok(Group::Custom(GroupSpec::from_json(&text)?))
            }
            (None, None) => bail!("pass --group or --spec"),
        }
    }

    pub fn spec(&self) -> GroupSpec {
        match self {
            Group::Grigorchuk => grigorchuk(),
            Group::Ggs(e) => ggs(e),
            Group::Apollonian => apollonian(),
            Group::Custom(s) => s.clone(),
        }
    }

    /// Growth exponent `d` of `a_{n+1} ~ a_n^d`: the tree degree.
    pub fn degree(&self) -> u32 {
        self.spec().degree() as u32
    }

    pub fn name(&self) -> String {
        self.spec().name().to_string()
    }

    pub fn branch_data(&self, file: Option<&std::path::Path>, level: Option<usize>) -> Result<BranchData> {
        if let Some(path) = file {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            return Ok(BranchData::from_json(&text)?);
        }
        match self {
            Group::Grigorchuk => Ok(grigorchuk_branch_data(level.unwrap_or(GRIGORCHUK_LEVEL))?),
            Group::Apollonian => Ok(apollonian_branch_data(level.unwrap_or(APOLLONIAN_LEVEL))?),
            Group::Ggs(_) => bail!("no branch data ships for GGS groups; pass --branch-data"),
            Group::Custom(_) => bail!("user-defined groups need --branch-data"),
        }
    }

    /// Series to depth `n` from the engine selected by `engine`.
    pub fn series(
        &self,
        n: usize,
        engine: Engine,
        branch_file: Option<&std::path::Path>,
        level: Option<usize>,
    ) -> Result<GrowthSeries> {
        let generic = engine == Engine::Generic || branch_file.is_some() || matches!(self, Group::Custom(_));
        if generic {
            return Ok(iterate_growth(&self.branch_data(branch_file, level)?, n)?);
        }
        Ok(match self {
            Group::Grigorchuk => grigorchuk_growth(n),
            Group::Ggs(e) => ggs_growth(e, n)?,
            Group::Apollonian => apollonian_growth(n)?,
            Group::Custom(_) => unreachable!("custom groups take the generic engine"),
        })
    }
}
