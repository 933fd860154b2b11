use std::fs;

use serde::Serialize;
use toruseq::constructions::{blowup_family, pair_eigenfunction, theorem31_family, PairList};
use toruseq::experiments::random_eigenfunction;
use toruseq::lattice::{enumerate_sphere, Eigenspace, SphereCache};
use toruseq::spectral::Eigenfunction;

use crate::{Failure, Family, Global, SourceArgs};

/// Where an eigenfunction came from, echoed into JSON summaries.
#[derive(Serialize, Debug, Clone)]
pub struct Provenance {
    pub family: String,
    pub d: usize,
    pub lambda: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

pub fn eigenspace(global: &Global, d: usize, lambda: u64) -> Result<Eigenspace, Failure> {
    Ok(match &global.cache_dir {
        Some(dir) => SphereCache::new(dir)?.get_or_enumerate(d, lambda)?,
        None => enumerate_sphere(d, lambda)?,
    })
}

pub fn load(args: &SourceArgs, global: &Global) -> Result<(Eigenfunction, Provenance), Failure> {
    if let Some(path) = &args.input {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
        // A pair list is recognised by its shape; anything else must be an
        // eigenfunction file.
        if let Ok(list) = PairList::from_json(&text) {
            let k = args.pair_index.ok_or_else(|| {
                Failure::Usage("a pair list input needs --pair-index".into())
            })?;
            let &(mu, nu) = list.pairs.get(k).ok_or_else(|| {
                Failure::Usage(format!("pair index {k} out of range ({} pairs)", list.pairs.len()))
            })?;
            let psi = pair_eigenfunction(mu, nu)?;
            let prov = Provenance {
                family: format!("pair:{k}"),
                d: list.d,
                lambda: list.lambda,
                m: None,
                seed: None,
            };
            return Ok((psi, prov));
        }
        let psi = Eigenfunction::from_json(&text)?;
        let prov = Provenance {
            family: "input".into(),
            d: psi.dim(),
            lambda: psi.eigenvalue(),
            m: None,
            seed: None,
        };
        return Ok((psi, prov));
    }
    let family = args
        .family
        .ok_or_else(|| Failure::Usage("give either --family or --input".into()))?;
    let need_lambda = || {
        args.lambda
            .ok_or_else(|| Failure::Usage("this family needs --lambda".into()))
    };
    let (psi, m, seed) = match family {
        Family::Thm31 => {
            let m = args.m.ok_or_else(|| Failure::Usage("--family thm31 needs --m".into()))?;
            (theorem31_family(m, args.d)?, Some(m), None)
        }
        Family::Blowup => (blowup_family(need_lambda()?, args.d)?, None, None),
        Family::Random => {
            let lambda = need_lambda()?;
            let space = eigenspace(global, args.d, lambda)?;
            if space.is_empty() {
                return Err(Failure::Usage(format!(
                    "no lattice points with |μ|² = {lambda} in dimension {}",
                    args.d
                )));
            }
            (random_eigenfunction(&space, global.seed)?, None, Some(global.seed))
        }
    };
    let name = match family {
        Family::Thm31 => "thm31",
        Family::Blowup => "blowup",
        Family::Random => "random",
    };
    let prov = Provenance {
        family: name.into(),
        d: psi.dim(),
        lambda: psi.eigenvalue(),
        m,
        seed,
    };
    Ok((psi, prov))
}
