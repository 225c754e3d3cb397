//! Versioned text encoding for keys and templates.
//!
//! Both are JSON objects carrying a `format` tag, a `version`, and the
//! scheme-tagged payload:
//!
//! ```text
//! {"format":"cbleak-key","version":1,"scheme":"biohash","n":4,"l":2,"tau":0.0,"basis":[[...],[...]],"seed":7}
//! {"format":"cbleak-template","version":1,"scheme":"biohash","payload":{"type":"bits","data":"0110"}}
//! ```
//!
//! Bit strings are written as `0`/`1` strings, reals in shortest round-trip form.

use serde::{Deserialize, Serialize};

use super::{BioHashKey, BloomKey, IfoKey, IoMKey, ProtectedTemplate, SchemeKey};
use crate::error::{Error, Result};

pub const KEY_FORMAT: &str = "cbleak-key";
pub const TEMPLATE_FORMAT: &str = "cbleak-template";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Envelope<T> {
    format: String,
    version: u32,
    #[serde(flatten)]
    body: T,
}

fn check_envelope<T>(env: &Envelope<T>, format: &str) -> Result<()> {
    if env.format != format {
        return Err(Error::format("encoding", format!("expected format {format:?}, found {:?}", env.format)));
    }
    if env.version != FORMAT_VERSION {
        return Err(Error::format("encoding", format!("unsupported version {}", env.version)));
    }
    Ok(())
}

impl SchemeKey {
    pub fn to_text(&self) -> Result<String> {
        Ok(serde_json::to_string(&Envelope {
            format: KEY_FORMAT.into(),
            version: FORMAT_VERSION,
            body: self,
        })?)
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let env: Envelope<SchemeKey> = serde_json::from_str(text)?;
        check_envelope(&env, KEY_FORMAT)?;
        env.body.validate()?;
        Ok(env.body)
    }

    /// Re-checks the construction invariants of a decoded key.
    pub fn validate(&self) -> Result<()> {
        match self {
            SchemeKey::BioHash(k) => {
                let rebuilt = BioHashKey::new(k.basis.clone(), k.tau, k.seed)?;
                if (rebuilt.n, rebuilt.l) != (k.n, k.l) {
                    return Err(Error::format("biohash key", "declared shape disagrees with basis"));
                }
            }
            SchemeKey::IoM(k) => {
                let rebuilt = IoMKey::new(k.matrices.clone(), k.seed)?;
                if (rebuilt.n, rebuilt.m, rebuilt.q) != (k.n, k.m, k.q) {
                    return Err(Error::format("iom key", "declared shape disagrees with matrices"));
                }
            }
            SchemeKey::Nmdsh(m) => {
                let slots = m.dims.len();
                if m.projection.len() != slots
                    || m.lo.len() != slots
                    || m.hi.len() != slots
                    || m.projection.iter().any(|r| r.len() != m.n)
                    || m.pairs.len() != m.l
                    || m.pairs.iter().any(|p| p.slot >= slots || p.mode == 0)
                    || m.lo.iter().zip(&m.hi).any(|(a, b)| a >= b)
                {
                    return Err(Error::format("nmdsh model", "inconsistent shapes"));
                }
            }
            SchemeKey::Bloom(k) => {
                BloomKey::new(k.height, k.width, k.word_size, k.block_size, k.xor_mask.clone(), k.perm.clone())?;
            }
            SchemeKey::Ifo(k) => {
                IfoKey::new(k.height, k.width, k.window, k.tau, k.perm_sets.clone(), k.seed)?;
            }
        }
        Ok(())
    }
}

impl ProtectedTemplate {
    pub fn to_text(&self) -> Result<String> {
        Ok(serde_json::to_string(&Envelope {
            format: TEMPLATE_FORMAT.into(),
            version: FORMAT_VERSION,
            body: self,
        })?)
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let env: Envelope<ProtectedTemplate> = serde_json::from_str(text)?;
        check_envelope(&env, TEMPLATE_FORMAT)?;
        Ok(env.body)
    }
}
