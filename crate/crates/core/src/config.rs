//! Declarative configuration with nested scopes.
//!
//! A [`ConfigScope`] is an immutable set of bindings plus an optional parent.
//! Resolution walks from the innermost scope outwards and falls back to the
//! built-in default of the item. Every bound value has already been checked
//! against the item's allowed set.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::sync::{Arc, RwLock};

use crate::error::{Error, MisuseClass, Result};
use crate::labels::{Algorithm, Curve, HashAlg, KeyKind, KeySize, Mode, SignMode};
use crate::provider;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConfigItem {
    KeyType,
    KeyTypeShared,
    KeyTypePublic,
    KeySizeShared,
    KeySizePublic,
    BlockCipherMode,
    SignHash,
    SignMode,
    Provider,
}

const SHARED_CIPHERS: [Algorithm; 5] = [
    Algorithm::Aes,
    Algorithm::Blowfish,
    Algorithm::TripleDes,
    Algorithm::Salsa20,
    Algorithm::ChaCha20,
];

const PUBLIC_ALGORITHMS: [Algorithm; 3] = [Algorithm::Rsa, Algorithm::Dsa, Algorithm::Ecdsa];

impl ConfigItem {
    pub const ALL: [ConfigItem; 9] = [
        ConfigItem::KeyType,
        ConfigItem::KeyTypeShared,
        ConfigItem::KeyTypePublic,
        ConfigItem::KeySizeShared,
        ConfigItem::KeySizePublic,
        ConfigItem::BlockCipherMode,
        ConfigItem::SignHash,
        ConfigItem::SignMode,
        ConfigItem::Provider,
    ];

    pub const fn name(self) -> &'static str {
        match self {
            ConfigItem::KeyType => "key_type",
            ConfigItem::KeyTypeShared => "key_type_shared",
            ConfigItem::KeyTypePublic => "key_type_public",
            ConfigItem::KeySizeShared => "key_size_shared",
            ConfigItem::KeySizePublic => "key_size_public",
            ConfigItem::BlockCipherMode => "block_cipher_mode",
            ConfigItem::SignHash => "sign_hash",
            ConfigItem::SignMode => "sign_mode",
            ConfigItem::Provider => "provider",
        }
    }

    pub fn lookup(name: &str) -> Result<Self> {
        let wanted = name.trim().to_ascii_lowercase();
        Self::ALL
            .into_iter()
            .find(|i| i.name() == wanted)
            .ok_or_else(|| Error::UnknownItem(name.trim().to_owned()))
    }

    /// Misuse class reported when a value outside the allowed set is given.
    pub const fn misuse_class(self) -> Option<MisuseClass> {
        match self {
            ConfigItem::KeyTypeShared | ConfigItem::KeyTypePublic => Some(MisuseClass::M3S),
            ConfigItem::KeySizeShared | ConfigItem::KeySizePublic => Some(MisuseClass::M1K),
            ConfigItem::BlockCipherMode => Some(MisuseClass::M1S),
            ConfigItem::SignHash => Some(MisuseClass::M1H),
            ConfigItem::KeyType | ConfigItem::SignMode | ConfigItem::Provider => None,
        }
    }

    pub fn default_value(self) -> ConfigValue {
        match self {
            ConfigItem::KeyType => ConfigValue::KeyKind(KeyKind::Shared),
            ConfigItem::KeyTypeShared => ConfigValue::Algorithm(Algorithm::Aes),
            ConfigItem::KeyTypePublic => ConfigValue::Algorithm(Algorithm::Rsa),
            ConfigItem::KeySizeShared => ConfigValue::Size(KeySize::Bits(256)),
            ConfigItem::KeySizePublic => ConfigValue::Size(KeySize::Bits(2048)),
            ConfigItem::BlockCipherMode => ConfigValue::Mode(Mode::Gcm),
            ConfigItem::SignHash => ConfigValue::Hash(HashAlg::Sha256),
            ConfigItem::SignMode => ConfigValue::SignMode(SignMode::Detached),
            ConfigItem::Provider => ConfigValue::Provider(provider::DEFAULT),
        }
    }

    /// The complete allowed-value set.
    pub fn allowed_values(self) -> Vec<ConfigValue> {
        match self {
            ConfigItem::KeyType => {
                vec![
                    ConfigValue::KeyKind(KeyKind::Shared),
                    ConfigValue::KeyKind(KeyKind::Public),
                ]
            }
            ConfigItem::KeyTypeShared => SHARED_CIPHERS
                .into_iter()
                .map(ConfigValue::Algorithm)
                .collect(),
            ConfigItem::KeyTypePublic => PUBLIC_ALGORITHMS
                .into_iter()
                .map(ConfigValue::Algorithm)
                .collect(),
            ConfigItem::KeySizeShared => (128..=512)
                .step_by(8)
                .map(|b| ConfigValue::Size(KeySize::Bits(b)))
                .collect(),
            ConfigItem::KeySizePublic => [
                KeySize::Bits(2048),
                KeySize::Bits(3072),
                KeySize::Bits(4096),
                KeySize::Curve(Curve::P256),
                KeySize::Curve(Curve::P384),
            ]
            .into_iter()
            .map(ConfigValue::Size)
            .collect(),
            ConfigItem::BlockCipherMode => Mode::ALL.into_iter().map(ConfigValue::Mode).collect(),
            ConfigItem::SignHash => HashAlg::ALL.into_iter().map(ConfigValue::Hash).collect(),
            ConfigItem::SignMode => vec![
                ConfigValue::SignMode(SignMode::Detached),
                ConfigValue::SignMode(SignMode::Combined),
            ],
            ConfigItem::Provider => provider::registry()
                .iter()
                .map(|p| ConfigValue::Provider(p.name))
                .collect(),
        }
    }

    /// Parses and whitelists a textual value for this item.
    pub fn parse_value(self, text: &str) -> Result<ConfigValue> {
        let parsed = match self {
            ConfigItem::KeyType => KeyKind::lookup(text).map(ConfigValue::KeyKind),
            ConfigItem::KeyTypeShared => Algorithm::lookup(text)
                .filter(|a| SHARED_CIPHERS.contains(a))
                .map(ConfigValue::Algorithm),
            ConfigItem::KeyTypePublic => Algorithm::lookup(text)
                .filter(|a| PUBLIC_ALGORITHMS.contains(a))
                .map(ConfigValue::Algorithm),
            ConfigItem::KeySizeShared | ConfigItem::KeySizePublic => {
                KeySize::parse(text).map(ConfigValue::Size)
            }
            ConfigItem::BlockCipherMode => Mode::lookup(text).map(ConfigValue::Mode),
            ConfigItem::SignHash => HashAlg::lookup(text).map(ConfigValue::Hash),
            ConfigItem::SignMode => SignMode::lookup(text).map(ConfigValue::SignMode),
            ConfigItem::Provider => provider::lookup(text).map(|p| ConfigValue::Provider(p.name)),
        };
        parsed
            .filter(|v| self.allows(v))
            .ok_or_else(|| Error::DisallowedValue {
                item: self.name().to_owned(),
                value: text.trim().to_owned(),
                class: self.misuse_class(),
                line: None,
            })
    }

    pub fn allows(self, value: &ConfigValue) -> bool {
        match (self, value) {
            (ConfigItem::KeySizeShared, ConfigValue::Size(KeySize::Bits(b))) => {
                (128..=512).contains(b) && b % 8 == 0
            }
            _ => self.allowed_values().contains(value),
        }
    }
}

impl fmt::Display for ConfigItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConfigValue {
    KeyKind(KeyKind),
    Algorithm(Algorithm),
    Size(KeySize),
    Mode(Mode),
    Hash(HashAlg),
    SignMode(SignMode),
    Provider(&'static str),
}

impl fmt::Display for ConfigValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigValue::KeyKind(k) => k.fmt(f),
            ConfigValue::Algorithm(a) => a.fmt(f),
            ConfigValue::Size(s) => s.fmt(f),
            ConfigValue::Mode(m) => m.fmt(f),
            ConfigValue::Hash(h) => h.fmt(f),
            ConfigValue::SignMode(m) => m.fmt(f),
            ConfigValue::Provider(p) => f.write_str(p),
        }
    }
}

/// One level of configuration. Cheap to clone; never mutated after creation.
#[derive(Clone, Debug, Default)]
pub struct ConfigScope {
    bindings: BTreeMap<ConfigItem, ConfigValue>,
    parent: Option<Arc<ConfigScope>>,
}

impl PartialEq for ConfigScope {
    /// Scopes are equal when they resolve every item identically.
    fn eq(&self, other: &Self) -> bool {
        ConfigItem::ALL
            .iter()
            .all(|i| self.resolve(*i) == other.resolve(*i))
    }
}

impl ConfigScope {
    /// An empty root scope: everything resolves to the defaults.
    pub fn root() -> Self {
        ConfigScope::default()
    }

    /// A new empty scope nested inside this one.
    pub fn child(&self) -> Self {
        ConfigScope {
            bindings: BTreeMap::new(),
            parent: Some(Arc::new(self.clone())),
        }
    }

    pub fn child_of(parent: Arc<ConfigScope>) -> Self {
        ConfigScope {
            bindings: BTreeMap::new(),
            parent: Some(parent),
        }
    }

    pub fn parent(&self) -> Option<&Arc<ConfigScope>> {
        self.parent.as_ref()
    }

    /// Returns a copy of this scope with `item` bound to `value`.
    pub fn set(&self, item: &str, value: &str) -> Result<Self> {
        let item = ConfigItem::lookup(item)?;
        let value = item.parse_value(value)?;
        Ok(self.bind(item, value))
    }

    /// Typed variant of [`ConfigScope::set`]; panics if `value` is outside
    /// the item's allowed set, which the typed labels make a programming error.
    pub fn bind(&self, item: ConfigItem, value: ConfigValue) -> Self {
        assert!(
            item.allows(&value),
            "{value} is not an allowed value for {item}"
        );
        let mut next = self.clone();
        next.bindings.insert(item, value);
        next
    }

    /// A child scope binding a single item.
    pub fn with(&self, item: &str, value: &str) -> Result<Self> {
        self.child().set(item, value)
    }

    /// Binding from the nearest scope that has one, if any.
    pub fn lookup(&self, item: ConfigItem) -> Option<ConfigValue> {
        let mut scope = Some(self);
        while let Some(s) = scope {
            if let Some(v) = s.bindings.get(&item) {
                return Some(*v);
            }
            scope = s.parent.as_deref();
        }
        None
    }

    pub fn resolve(&self, item: ConfigItem) -> ConfigValue {
        self.lookup(item).unwrap_or_else(|| item.default_value())
    }

    pub fn resolve_name(&self, item: &str) -> Result<ConfigValue> {
        ConfigItem::lookup(item).map(|i| self.resolve(i))
    }

    /// Bindings made directly in this scope.
    pub fn own_bindings(&self) -> impl Iterator<Item = (ConfigItem, ConfigValue)> + '_ {
        self.bindings.iter().map(|(k, v)| (*k, *v))
    }

    pub fn key_type(&self) -> KeyKind {
        match self.resolve(ConfigItem::KeyType) {
            ConfigValue::KeyKind(k) => k,
            other => unreachable!("key_type bound to {other}"),
        }
    }

    pub fn key_type_shared(&self) -> Algorithm {
        self.algorithm(ConfigItem::KeyTypeShared)
    }

    pub fn key_type_public(&self) -> Algorithm {
        self.algorithm(ConfigItem::KeyTypePublic)
    }

    fn algorithm(&self, item: ConfigItem) -> Algorithm {
        match self.resolve(item) {
            ConfigValue::Algorithm(a) => a,
            other => unreachable!("{item} bound to {other}"),
        }
    }

    pub fn key_size_shared(&self) -> KeySize {
        self.size(ConfigItem::KeySizeShared)
    }

    pub fn key_size_public(&self) -> KeySize {
        self.size(ConfigItem::KeySizePublic)
    }

    fn size(&self, item: ConfigItem) -> KeySize {
        match self.resolve(item) {
            ConfigValue::Size(s) => s,
            other => unreachable!("{item} bound to {other}"),
        }
    }

    pub fn block_cipher_mode(&self) -> Mode {
        match self.resolve(ConfigItem::BlockCipherMode) {
            ConfigValue::Mode(m) => m,
            other => unreachable!("block_cipher_mode bound to {other}"),
        }
    }

    pub fn sign_hash(&self) -> HashAlg {
        match self.resolve(ConfigItem::SignHash) {
            ConfigValue::Hash(h) => h,
            other => unreachable!("sign_hash bound to {other}"),
        }
    }

    pub fn sign_mode(&self) -> SignMode {
        match self.resolve(ConfigItem::SignMode) {
            ConfigValue::SignMode(m) => m,
            other => unreachable!("sign_mode bound to {other}"),
        }
    }

    pub fn provider(&self) -> &'static provider::Provider {
        match self.resolve(ConfigItem::Provider) {
            ConfigValue::Provider(name) => {
                provider::lookup(name).expect("bound provider is registered")
            }
            other => unreachable!("provider bound to {other}"),
        }
    }
}

/// Parses the textual config format into a scope nested under `parent`.
///
/// One `name = value` per line; `#` starts a comment; blank lines are skipped.
pub fn parse_config(text: &str, parent: Option<Arc<ConfigScope>>) -> Result<ConfigScope> {
    let mut scope = ConfigScope {
        bindings: BTreeMap::new(),
        parent,
    };
    for (index, raw) in text.lines().enumerate() {
        let lineno = index + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (name, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {lineno}: expected `name = value`")))?;
        let (name, value) = (name.trim(), value.trim());
        if name.is_empty() || value.is_empty() {
            return Err(Error::Parse(format!(
                "line {lineno}: expected `name = value`"
            )));
        }
        let item = ConfigItem::lookup(name)?;
        let value = item.parse_value(value).map_err(|e| match e {
            Error::DisallowedValue {
                item, value, class, ..
            } => Error::DisallowedValue {
                item,
                value,
                class,
                line: Some(lineno),
            },
            other => other,
        })?;
        scope.bindings.insert(item, value);
    }
    Ok(scope)
}

pub fn load_config_file(path: impl AsRef<Path>) -> Result<ConfigScope> {
    load_config_file_under(path, None)
}

/// Loads a config file as a scope nested under `parent`.
pub fn load_config_file_under(
    path: impl AsRef<Path>,
    parent: Option<Arc<ConfigScope>>,
) -> Result<ConfigScope> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text, parent)
}

static GLOBAL: RwLock<Option<Arc<ConfigScope>>> = RwLock::new(None);

/// The process-wide root scope.
pub fn global() -> Arc<ConfigScope> {
    let guard = GLOBAL.read().unwrap_or_else(|e| e.into_inner());
    guard.clone().unwrap_or_default()
}

/// Atomically replaces the process-wide root scope.
pub fn replace_global(scope: ConfigScope) {
    *GLOBAL.write().unwrap_or_else(|e| e.into_inner()) = Some(Arc::new(scope));
}

/// Binds one item in the process-wide scope.
pub fn configure(item: &str, value: &str) -> Result<()> {
    let mut guard = GLOBAL.write().unwrap_or_else(|e| e.into_inner());
    let current = guard.clone().unwrap_or_default();
    *guard = Some(Arc::new(current.set(item, value)?));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn defaults_match_table() {
        let root = ConfigScope::root();
        let names: Vec<String> = ConfigItem::ALL
            .iter()
            .map(|i| root.resolve(*i).to_string())
            .collect();
        assert_eq!(
            names,
            [
                "shared",
                "AES",
                "RSA",
                "256",
                "2048",
                "GCM",
                "SHA256",
                "detached",
                "rustcrypto"
            ]
        );
        for item in ConfigItem::ALL {
            assert!(item.allows(&item.default_value()), "{item}");
            assert!(!item.allowed_values().is_empty());
        }
    }

    #[test]
    fn set_and_resolve() {
        let scope = ConfigScope::root().set("sign_mode", "combined").unwrap();
        assert_eq!(scope.sign_mode(), SignMode::Combined);
        let same = ConfigScope::root().set("block_cipher_mode", "GCM").unwrap();
        assert_eq!(same, ConfigScope::root());
    }

    #[test]
    fn ecb_is_rejected_with_m1s() {
        let err = ConfigScope::root()
            .set("block_cipher_mode", "ECB")
            .unwrap_err();
        assert_eq!(err.misuse_class(), Some(MisuseClass::M1S));
    }

    #[test]
    fn misuse_classes_of_items() {
        let root = ConfigScope::root();
        let class = |item, value| root.set(item, value).unwrap_err().misuse_class();
        assert_eq!(class("key_type_shared", "DES"), Some(MisuseClass::M3S));
        assert_eq!(class("key_type_shared", "RC4"), Some(MisuseClass::M3S));
        assert_eq!(class("key_type_public", "ElGamal"), Some(MisuseClass::M3S));
        assert_eq!(class("key_size_shared", "64"), Some(MisuseClass::M1K));
        assert_eq!(class("key_size_public", "1024"), Some(MisuseClass::M1K));
        assert_eq!(class("sign_hash", "MD5"), Some(MisuseClass::M1H));
        assert_eq!(class("sign_hash", "SHA1"), Some(MisuseClass::M1H));
        assert!(matches!(
            root.set("sign_mode", "both"),
            Err(Error::DisallowedValue { .. })
        ));
        assert!(matches!(
            root.set("colour", "blue"),
            Err(Error::UnknownItem(_))
        ));
    }

    #[test]
    fn values_are_case_insensitive() {
        let scope = ConfigScope::root()
            .set("KEY_TYPE_SHARED", "chacha20")
            .unwrap()
            .set("block_cipher_mode", "cbc")
            .unwrap()
            .set("sign_hash", "sha-512")
            .unwrap();
        assert_eq!(scope.key_type_shared(), Algorithm::ChaCha20);
        assert_eq!(scope.block_cipher_mode(), Mode::Cbc);
        assert_eq!(scope.sign_hash(), HashAlg::Sha512);
    }

    #[test]
    fn inner_scope_wins_and_inherits() {
        let outer = ConfigScope::root()
            .set("sign_mode", "detached")
            .unwrap()
            .set("key_type_shared", "ChaCha20")
            .unwrap();
        let inner = outer.with("sign_mode", "combined").unwrap();
        assert_eq!(inner.sign_mode(), SignMode::Combined);
        assert_eq!(inner.key_type_shared(), Algorithm::ChaCha20);
        assert_eq!(outer.sign_mode(), SignMode::Detached);
    }

    #[test]
    fn config_file_parsing() {
        let scope = parse_config("# comment\n\nsign_mode = combined  # trailing\n", None).unwrap();
        assert_eq!(scope.sign_mode(), SignMode::Combined);
        assert_eq!(parse_config("", None).unwrap(), ConfigScope::root());
        match parse_config("sign_mode = combined\nblock_cipher_mode = ECB\n", None) {
            Err(e @ Error::DisallowedValue { line: Some(2), .. }) => {
                assert_eq!(e.misuse_class(), Some(MisuseClass::M1S));
                assert!(e.to_string().contains("line 2"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_config("sign_mode combined", None),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            parse_config("bogus = 1", None),
            Err(Error::UnknownItem(_))
        ));
    }

    #[test]
    fn config_file_from_disk() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.conf");
        std::fs::write(&path, "key_size_public = 3072\n").unwrap();
        let scope = load_config_file(&path).unwrap();
        assert_eq!(scope.key_size_public(), KeySize::Bits(3072));
        assert!(matches!(
            load_config_file(dir.path().join("missing")),
            Err(Error::Io(_))
        ));
    }

    #[test]
    fn global_scope_replacement() {
        configure("sign_hash", "SHA384").unwrap();
        assert_eq!(global().sign_hash(), HashAlg::Sha384);
        assert!(configure("sign_hash", "MD5").is_err());
        assert_eq!(global().sign_hash(), HashAlg::Sha384);
        replace_global(ConfigScope::root());
        assert_eq!(global().sign_hash(), HashAlg::Sha256);
    }

    fn binding() -> impl Strategy<Value = (ConfigItem, ConfigValue)> {
        proptest::sample::select(ConfigItem::ALL.to_vec()).prop_flat_map(|item| {
            proptest::sample::select(item.allowed_values()).prop_map(move |v| (item, v))
        })
    }

    proptest! {
        #[test]
        fn chain_matches_flattened_overlay(
            levels in proptest::collection::vec(proptest::collection::vec(binding(), 0..5), 1..6)
        ) {
            let mut scope = ConfigScope::root();
            let mut flat: BTreeMap<ConfigItem, ConfigValue> = BTreeMap::new();
            for (depth, level) in levels.iter().enumerate() {
                if depth > 0 {
                    scope = scope.child();
                }
                for (item, value) in level {
                    scope = scope.set(item.name(), &value.to_string()).unwrap();
                    flat.insert(*item, *value);
                }
            }
            for item in ConfigItem::ALL {
                let expected = flat.get(&item).copied().unwrap_or_else(|| item.default_value());
                prop_assert_eq!(scope.resolve(item), expected);
                prop_assert!(item.allows(&scope.resolve(item)));
            }
        }

        #[test]
        fn set_leaves_parent_untouched(first in binding(), second in binding()) {
            let parent = ConfigScope::root().set(first.0.name(), &first.1.to_string()).unwrap();
            let before: Vec<_> = ConfigItem::ALL.iter().map(|i| parent.resolve(*i)).collect();
            let _child = parent.with(second.0.name(), &second.1.to_string()).unwrap();
            let after: Vec<_> = ConfigItem::ALL.iter().map(|i| parent.resolve(*i)).collect();
            prop_assert_eq!(before, after);
        }
    }
}
