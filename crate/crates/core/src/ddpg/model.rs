//! Trained-model artifact: actor weights plus a `key=value` sidecar.

use std::fs;
use std::path::{Path, PathBuf};

use crate::benchmarks::FunctionId;
use crate::neural::Mlp;

use super::action::{Mode, Variant};
use super::state::STATE_WIDTH;
use super::DdpgError;

#[derive(Debug, Clone, PartialEq)]
pub struct ModelMeta {
    pub mode: Mode,
    pub variant: Variant,
    pub subgroups: usize,
    pub action_width: usize,
    pub state_width: usize,
    pub pool: Vec<FunctionId>,
    pub episodes: usize,
    pub seed: u64,
}

impl ModelMeta {
    pub fn to_text(&self) -> String {
        let pool: Vec<&str> = self.pool.iter().map(|f| f.name()).collect();
        format!(
            "mode={}\nvariant={}\nsubgroups={}\naction_width={}\nstate_width={}\npool={}\nepisodes={}\nseed={}\n",
            self.mode,
            self.variant,
            self.subgroups,
            self.action_width,
            self.state_width,
            pool.join(","),
            self.episodes,
            self.seed
        )
    }

    pub fn parse(text: &str) -> Result<Self, DdpgError> {
        let mut mode = None;
        let mut variant = None;
        let mut subgroups = None;
        let mut action_width = None;
        let mut state_width = None;
        let mut pool = None;
        let mut episodes = None;
        let mut seed = None;
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| DdpgError::BadSidecar(format!("line {}: expected key=value", n + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let int = |v: &str| {
                v.parse::<u64>()
                    .map_err(|_| DdpgError::BadSidecar(format!("{key}: `{v}` is not an integer")))
            };
            match key {
                "mode" => mode = Some(value.parse()?),
                "variant" => variant = Some(value.parse()?),
                "subgroups" => subgroups = Some(int(value)? as usize),
                "action_width" => action_width = Some(int(value)? as usize),
                "state_width" => state_width = Some(int(value)? as usize),
                "pool" => {
                    pool = Some(
                        value
                            .split(',')
                            .map(|f| f.trim().parse::<FunctionId>())
                            .collect::<Result<Vec<_>, _>>()?,
                    )
                }
                "episodes" => episodes = Some(int(value)? as usize),
                "seed" => seed = Some(int(value)?),
                other => return Err(DdpgError::BadSidecar(format!("unknown key `{other}`"))),
            }
        }
        let missing = |k: &str| DdpgError::BadSidecar(format!("missing key `{k}`"));
        Ok(ModelMeta {
            mode: mode.ok_or_else(|| missing("mode"))?,
            variant: variant.ok_or_else(|| missing("variant"))?,
            subgroups: subgroups.ok_or_else(|| missing("subgroups"))?,
            action_width: action_width.ok_or_else(|| missing("action_width"))?,
            state_width: state_width.ok_or_else(|| missing("state_width"))?,
            pool: pool.ok_or_else(|| missing("pool"))?,
            episodes: episodes.ok_or_else(|| missing("episodes"))?,
            seed: seed.ok_or_else(|| missing("seed"))?,
        })
    }
}

/// Path of the sidecar that accompanies a weights file.
pub fn sidecar_path(weights: &Path) -> PathBuf {
    let mut name = weights.as_os_str().to_owned();
    name.push(".meta");
    PathBuf::from(name)
}

pub fn save_model(path: &Path, actor: &Mlp, meta: &ModelMeta) -> Result<(), DdpgError> {
    actor.save_weights(path)?;
    fs::write(sidecar_path(path), meta.to_text())?;
    Ok(())
}

/// Loads an actor and its sidecar, checking that they agree.
pub fn load_model(path: &Path) -> Result<(Mlp, ModelMeta), DdpgError> {
    let actor = Mlp::load_weights(path)?;
    let meta_path = sidecar_path(path);
    let text = fs::read_to_string(&meta_path)
        .map_err(|e| DdpgError::BadSidecar(format!("{}: {e}", meta_path.display())))?;
    let meta = ModelMeta::parse(&text)?;
    if meta.state_width != STATE_WIDTH
        || actor.input_dim() != meta.state_width
        || actor.output_dim() != meta.action_width
        || meta.action_width != meta.variant.group_width() * meta.subgroups
    {
        return Err(DdpgError::BadSidecar(format!(
            "sidecar describes {}→{} for {} but weights are {:?}",
            meta.state_width,
            meta.action_width,
            meta.variant,
            actor.dims()
        )));
    }
    Ok((actor, meta))
}
