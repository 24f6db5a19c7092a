#pragma once

#include <string>
#include <vector>

#include "pdgfix/matcher.hpp"
#include "pdgfix/pattern.hpp"

namespace pdgfix {

/// Rewrites the bundle's canonical-tree node references onto the match
/// target (composing syntax->vertex, the isomorphism, and vertex->syntax)
/// and substitutes bound identifiers for placeholders. Throws RemapFailure
/// with the failing action index; callers then report the finding as not
/// fixable.
std::vector<EditAction> remap_script(const PatternBundle &bundle,
                                     const Finding &finding,
                                     const Pdg &target);

/// remap + transactional apply + render. The result parses and the fixed
/// site no longer matches the bundle. On any error the original source is
/// returned unchanged.
std::string apply_fix(const std::string &source, const SyntaxTree &tree,
                      const Finding &finding, const PatternBundle &bundle,
                      const Pdg &target);

} // namespace pdgfix
