#include <algorithm>
#include <unordered_set>

#include "pdgfix/patterncompile.hpp"

namespace pdgfix {

namespace {

// Python builtins plus stdlib names that should keep exact-label matching
// when a pattern uses them consistently.
const std::unordered_set<std::string> &standard_names() {
  static const std::unordered_set<std::string> names = {
      // builtins
      "abs", "all", "any", "ascii", "bin", "bool", "bytearray", "bytes",
      "callable", "chr", "classmethod", "compile", "complex", "delattr",
      "dict", "dir", "divmod", "enumerate", "eval", "exec", "filter", "float",
      "format", "frozenset", "getattr", "globals", "hasattr", "hash", "help",
      "hex", "id", "input", "int", "isinstance", "issubclass", "iter", "len",
      "list", "locals", "map", "max", "memoryview", "min", "next", "object",
      "oct", "open", "ord", "pow", "print", "property", "range", "repr",
      "reversed", "round", "set", "setattr", "slice", "sorted", "staticmethod",
      "str", "sum", "super", "tuple", "type", "vars", "zip",
      // constants
      "None", "True", "False", "NotImplemented", "Ellipsis",
      // common exception types
      "Exception", "ValueError", "TypeError", "KeyError", "IndexError",
      "AttributeError", "RuntimeError", "StopIteration", "OSError",
      "NotImplementedError", "ZeroDivisionError",
      // common stdlib dotted names
      "os.path.join", "os.path.exists", "os.path.basename", "os.path.dirname",
      "os.environ", "os.getcwd", "sys.argv", "sys.exit", "sys.stdout",
      "sys.stderr", "json.dumps", "json.loads", "json.dump", "json.load",
      "re.match", "re.search", "re.sub", "re.compile", "re.findall",
      "math.sqrt", "math.floor", "math.ceil", "math.log", "math.exp",
      "itertools.chain", "itertools.product", "itertools.combinations",
      "collections.OrderedDict", "collections.defaultdict",
      "collections.Counter", "collections.namedtuple", "collections.Callable",
      "functools.reduce", "functools.partial", "functools.wraps",
      "copy.deepcopy", "copy.copy", "random.choice", "random.randint",
      "random.random", "time.time", "time.sleep", "logging.getLogger",
      "np.log", "np.exp", "np.array", "np.zeros", "np.ones",
  };
  return names;
}

} // namespace

const BuiltinRegistry &BuiltinRegistry::standard() {
  static const BuiltinRegistry registry;
  return registry;
}

BuiltinRegistry::BuiltinRegistry(std::vector<std::string> extra)
    : extra_(std::move(extra)) {}

bool BuiltinRegistry::contains(const std::string &name) const {
  if (standard_names().count(name))
    return true;
  return std::find(extra_.begin(), extra_.end(), name) != extra_.end();
}

} // namespace pdgfix
