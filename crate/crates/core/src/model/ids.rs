use std::fmt;

use serde::{Deserialize, Serialize};

macro_rules! string_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                Self(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(id: &str) -> Self {
                Self(id.to_owned())
            }
        }

        impl From<String> for $name {
            fn from(id: String) -> Self {
                Self(id)
            }
        }
    };
}

string_id!(
    /// Identifier of a collaboration network. Also used as a directory name
    /// by the store, see [`NetworkId::is_path_safe`].
    NetworkId
);
string_id!(OrgId);
string_id!(NodeId);
string_id!(LinkId);

impl NetworkId {
    /// Non-empty, at most 128 bytes of `[A-Za-z0-9._-]`, not starting with a dot.
    pub fn is_path_safe(&self) -> bool {
        let s = self.as_str();
        !s.is_empty()
            && s.len() <= 128
            && !s.starts_with('.')
            && s
                .bytes()
                .all(|b| b.is_ascii_alphanumeric() || matches!(b, b'-' | b'_' | b'.'))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_safety() {
        assert!(NetworkId::from("public-accounting_2010").is_path_safe());
        assert!(!NetworkId::from("").is_path_safe());
        assert!(!NetworkId::from("..").is_path_safe());
        assert!(!NetworkId::from("a/b").is_path_safe());
        assert!(!NetworkId::from("white space").is_path_safe());
    }

    #[test]
    fn serializes_as_plain_string() {
        let id = OrgId::from("treasury");
        assert_eq!(serde_json::to_string(&id).unwrap(), "\"treasury\"");
    }
}
