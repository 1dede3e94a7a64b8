use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

/// Response languages covered by the numeral and phrase tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Lang {
    #[serde(rename = "EN")]
    En,
    #[serde(rename = "HI")]
    Hi,
    #[serde(rename = "ZH")]
    Zh,
    #[serde(rename = "ES")]
    Es,
}

impl Lang {
    pub const ALL: [Lang; 4] = [Lang::En, Lang::Hi, Lang::Zh, Lang::Es];

    pub fn code(self) -> &'static str {
        match self {
            Lang::En => "EN",
            Lang::Hi => "HI",
            Lang::Zh => "ZH",
            Lang::Es => "ES",
        }
    }
}

impl fmt::Display for Lang {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown language code {0:?} (expected EN, HI, ZH or ES)")]
pub struct UnknownLang(pub alloc::string::String);

impl FromStr for Lang {
    type Err = UnknownLang;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "EN" => Ok(Lang::En),
            "HI" => Ok(Lang::Hi),
            "ZH" => Ok(Lang::Zh),
            "ES" => Ok(Lang::Es),
            _ => Err(UnknownLang(s.into())),
        }
    }
}
