#include "fastcharge/checkpoint.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "fastcharge/errors.hpp"
#include "fastcharge/text_util.hpp"

namespace fastcharge {

namespace {

constexpr const char* magic = "fastcharge-td3-checkpoint";

void write_net(std::ostream& out, const char* name, const Mlp& net)
{
    out << "net " << name << ' ' << (net.head() == OutputHead::bounded ? "bounded" : "linear") << ' '
        << round_trip(net.low()) << ' ' << round_trip(net.high()) << ' ' << net.sizes().size();
    for (int s : net.sizes()) out << ' ' << s;
    out << '\n' << net.parameter_count() << '\n';
    for (Eigen::Index k = 0; k < net.params().size(); ++k) out << round_trip(net.params()[k]) << '\n';
}

class Reader {
public:
    explicit Reader(const std::filesystem::path& path) : path_(path), in_(path)
    {
        if (!in_) throw IoError("cannot read " + path.string());
    }

    std::vector<std::string> line()
    {
        std::string l;
        if (!std::getline(in_, l)) throw ConfigError(where() + ": unexpected end of checkpoint");
        ++n_;
        std::vector<std::string> out;
        for (auto t : split_whitespace(l)) out.emplace_back(t);
        return out;
    }

    std::string where() const { return path_.string() + ":" + std::to_string(n_); }

    Mlp net(const std::string& expected)
    {
        const auto h = line();
        if (h.size() < 6 || h[0] != "net" || h[1] != expected)
            throw ConfigError(where() + ": expected network '" + expected + "'");
        const OutputHead head = h[2] == "bounded" ? OutputHead::bounded : OutputHead::linear;
        const double lo = parse_double(h[3], where());
        const double hi = parse_double(h[4], where());
        const auto layers = static_cast<std::size_t>(parse_int(h[5], where()));
        if (h.size() != 6 + layers) throw ConfigError(where() + ": layer count mismatch");
        std::vector<int> sizes;
        for (std::size_t k = 0; k < layers; ++k) sizes.push_back(static_cast<int>(parse_int(h[6 + k], where())));
        Mlp m(sizes, head, lo, hi);
        const auto count = static_cast<std::size_t>(parse_int(line().at(0), where()));
        if (count != m.parameter_count()) throw ConfigError(where() + ": parameter count mismatch");
        for (std::size_t k = 0; k < count; ++k)
            m.params()[static_cast<Eigen::Index>(k)] = parse_double(line().at(0), where());
        return m;
    }

private:
    std::filesystem::path path_;
    std::ifstream in_;
    int n_{0};
};

std::map<std::string, std::string> read_header(Reader& r, int& state_dim)
{
    auto h = r.line();
    if (h.size() != 2 || h[0] != magic) throw ConfigError(r.where() + ": not a checkpoint file");
    if (parse_int(h[1], r.where()) != checkpoint_version)
        throw ConfigError(r.where() + ": unsupported checkpoint version " + h[1]);
    h = r.line();
    if (h.size() != 2 || h[0] != "state_dim") throw ConfigError(r.where() + ": expected state_dim");
    state_dim = static_cast<int>(parse_int(h[1], r.where()));
    h = r.line();
    if (h.size() != 2 || h[0] != "config") throw ConfigError(r.where() + ": expected config count");
    const auto n = parse_int(h[1], r.where());
    std::map<std::string, std::string> cfg;
    for (long long k = 0; k < n; ++k) {
        h = r.line();
        if (h.size() != 2) throw ConfigError(r.where() + ": expected 'key value'");
        cfg[h[0]] = h[1];
    }
    return cfg;
}

}  // namespace

void save_checkpoint(const Td3Agent& agent, const std::filesystem::path& path)
{
    const Td3Config& c = agent.config();
    const std::vector<std::pair<const char*, std::string>> cfg = {
        {"lr_actor", round_trip(c.lr_actor)},
        {"lr_critic", round_trip(c.lr_critic)},
        {"gamma", round_trip(c.gamma)},
        {"buffer_capacity", std::to_string(c.buffer_capacity)},
        {"minibatch", std::to_string(c.minibatch)},
        {"tau", round_trip(c.tau)},
        {"policy_delay", std::to_string(c.policy_delay)},
        {"hidden", std::to_string(c.hidden)},
        {"sigma_explore_start", round_trip(c.sigma_explore_start)},
        {"sigma_explore_end", round_trip(c.sigma_explore_end)},
        {"sigma_decay_episodes", std::to_string(c.sigma_decay_episodes)},
        {"warmup_steps", std::to_string(c.warmup_steps)},
        {"sigma_target", round_trip(c.sigma_target)},
        {"target_clip", round_trip(c.target_clip)},
        {"action_low", round_trip(c.action_low)},
        {"action_high", round_trip(c.action_high)},
        {"actor_final_scale", round_trip(c.actor_final_scale)},
        {"seed", std::to_string(c.seed)},
    };
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError("cannot write " + tmp.string());
        out << magic << ' ' << checkpoint_version << '\n';
        out << "state_dim " << agent.state_dim() << '\n';
        out << "config " << cfg.size() << '\n';
        for (const auto& [k, v] : cfg) out << k << ' ' << v << '\n';
        write_net(out, "actor", agent.actor);
        write_net(out, "critic1", agent.critic1);
        write_net(out, "critic2", agent.critic2);
        write_net(out, "actor_target", agent.actor_target);
        write_net(out, "critic1_target", agent.critic1_target);
        write_net(out, "critic2_target", agent.critic2_target);
        if (!out) throw IoError("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

Td3Agent load_checkpoint(const std::filesystem::path& path)
{
    Reader r(path);
    int state_dim = 0;
    const auto cfg = read_header(r, state_dim);
    auto get = [&](const char* key) -> const std::string& {
        auto it = cfg.find(key);
        if (it == cfg.end()) throw ConfigError(path.string() + ": checkpoint config lacks '" + key + "'");
        return it->second;
    };
    const std::string w = path.string();
    Td3Config c;
    c.lr_actor = parse_double(get("lr_actor"), w);
    c.lr_critic = parse_double(get("lr_critic"), w);
    c.gamma = parse_double(get("gamma"), w);
    c.buffer_capacity = static_cast<std::size_t>(parse_int(get("buffer_capacity"), w));
    c.minibatch = static_cast<std::size_t>(parse_int(get("minibatch"), w));
    c.tau = parse_double(get("tau"), w);
    c.policy_delay = static_cast<int>(parse_int(get("policy_delay"), w));
    c.hidden = static_cast<int>(parse_int(get("hidden"), w));
    c.sigma_explore_start = parse_double(get("sigma_explore_start"), w);
    c.sigma_explore_end = parse_double(get("sigma_explore_end"), w);
    c.sigma_decay_episodes = static_cast<int>(parse_int(get("sigma_decay_episodes"), w));
    c.warmup_steps = static_cast<long>(parse_int(get("warmup_steps"), w));
    c.sigma_target = parse_double(get("sigma_target"), w);
    c.target_clip = parse_double(get("target_clip"), w);
    c.action_low = parse_double(get("action_low"), w);
    c.action_high = parse_double(get("action_high"), w);
    c.actor_final_scale = parse_double(get("actor_final_scale"), w);
    c.seed = static_cast<unsigned long long>(parse_int(get("seed"), w));
    Td3Agent agent(state_dim, c);
    agent.actor = r.net("actor");
    agent.critic1 = r.net("critic1");
    agent.critic2 = r.net("critic2");
    agent.actor_target = r.net("actor_target");
    agent.critic1_target = r.net("critic1_target");
    agent.critic2_target = r.net("critic2_target");
    return agent;
}

Mlp load_actor(const std::filesystem::path& path)
{
    Reader r(path);
    int state_dim = 0;
    read_header(r, state_dim);
    return r.net("actor");
}

}  // namespace fastcharge
