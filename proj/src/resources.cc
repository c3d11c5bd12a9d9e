#include "dangspeech/resources.hpp"

namespace dangspeech {

ResourcePaths ResourcePaths::in(const std::filesystem::path& dir) {
  ResourcePaths p;
  p.lexicon = dir / "lexicon.tsv";
  p.seed_rules = dir / "seed_rules.tsv";
  p.emoji = dir / "emoji_polarity.tsv";
  p.conditional = dir / "conditional_markers.txt";
  p.modal = dir / "modal_markers.txt";
  p.body_parts = dir / "body_parts.txt";
  p.sports = dir / "sports_terms.txt";
  if (std::filesystem::exists(dir / "rules.conf")) p.rule_config = dir / "rules.conf";
  return p;
}

void ResourcePaths::validate() const {
  for (const auto* p : {&lexicon, &seed_rules, &emoji, &conditional, &modal, &body_parts, &sports})
    if (!std::filesystem::is_regular_file(*p)) throw IoError("missing data file " + p->string());
  if (rule_config && !std::filesystem::is_regular_file(*rule_config))
    throw IoError("missing rule config " + rule_config->string());
}

namespace {

const ResourcePaths& checked(const ResourcePaths& p) {
  p.validate();
  return p;
}

}  // namespace

Resources::Resources(const ResourcePaths& paths)
    : lexicon_(Lexicon::load(checked(paths).lexicon)),
      rules_(load_rules(paths.seed_rules)),
      seeds_(generate_all(lexicon_, rules_)),
      matcher_(seeds_),
      emoji_(EmojiLexicon::load(paths.emoji)),
      markers_{MarkerLexicon::load(paths.conditional), MarkerLexicon::load(paths.modal),
               MarkerLexicon::load(paths.body_parts)},
      engine_(MarkerLexicon::load(paths.sports),
              paths.rule_config ? RuleConfig::load(*paths.rule_config) : RuleConfig{}) {}

}  // namespace dangspeech
