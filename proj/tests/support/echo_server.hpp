#pragma once

// In-process stand-in for the /score service, speaking the same wire
// protocol. Used by client tests so they never need the real scoring service.

#include <atomic>
#include <chrono>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"
#include "json.hpp"

namespace clir::testing {

class EchoServer {
  public:
    enum class Mode {
        negated_index,   ///< score of pair i within the request is -i
        doc_id_number,   ///< score is -N for doc_id "dN", so order survives batching
        empty_scores,    ///< {"scores": []}
        null_score,      ///< first score is null
        huge_score,      ///< first score overflows to infinity
    };

    EchoServer() {
        server_.Get("/health", [](const httplib::Request&, httplib::Response& res) {
            res.set_content(R"({"status":"ok","model":"echo"})", "application/json");
        });
        server_.Post("/score", [this](const httplib::Request& req, httplib::Response& res) { handle(req, res); });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~EchoServer() {
        server_.stop();
        if (thread_.joinable()) thread_.join();
    }

    EchoServer(const EchoServer&) = delete;
    EchoServer& operator=(const EchoServer&) = delete;

    [[nodiscard]] std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_); }

    std::atomic<Mode> mode{Mode::negated_index};
    std::atomic<int> fail_first{0};      ///< answer 503 to this many requests first
    std::atomic<int> fail_status{503};
    std::atomic<int> delay_ms{0};        ///< sleep before answering
    std::atomic<int> delay_first{0};     ///< only delay this many requests (0: all)

    [[nodiscard]] int requests() const { return requests_; }
    [[nodiscard]] std::vector<std::size_t> batch_sizes() const {
        std::lock_guard lock(mutex_);
        return batch_sizes_;
    }

  private:
    void handle(const httplib::Request& req, httplib::Response& res) {
        const int n = requests_++;
        if (delay_ms > 0 && (delay_first == 0 || n < delay_first)) {
            std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms.load()));
        }
        if (n < fail_first) {
            res.status = fail_status;
            res.set_content(R"({"error":"unavailable"})", "application/json");
            return;
        }
        nlohmann::json body;
        try {
            body = nlohmann::json::parse(req.body);
        } catch (const std::exception&) {
            res.status = 400;
            res.set_content(R"({"error":"malformed body"})", "application/json");
            return;
        }
        const auto& pairs = body.at("pairs");
        {
            std::lock_guard lock(mutex_);
            batch_sizes_.push_back(pairs.size());
        }
        std::string scores;
        switch (mode.load()) {
            case Mode::negated_index:
            case Mode::doc_id_number: {
                nlohmann::json out = nlohmann::json::array();
                for (std::size_t i = 0; i < pairs.size(); ++i) {
                    if (mode == Mode::negated_index) {
                        out.push_back(-static_cast<double>(i));
                    } else {
                        const auto id = pairs[i].at("doc_id").get<std::string>();
                        out.push_back(-std::stod(id.substr(1)));
                    }
                }
                scores = out.dump();
                break;
            }
            case Mode::empty_scores: scores = "[]"; break;
            case Mode::null_score: {
                scores = "[null";
                for (std::size_t i = 1; i < pairs.size(); ++i) scores += ",0";
                scores += "]";
                break;
            }
            case Mode::huge_score: {
                scores = "[1e999";
                for (std::size_t i = 1; i < pairs.size(); ++i) scores += ",0";
                scores += "]";
                break;
            }
        }
        res.set_content("{\"scores\":" + scores + "}", "application/json");
    }

    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
    std::atomic<int> requests_{0};
    mutable std::mutex mutex_;
    std::vector<std::size_t> batch_sizes_;
};

}  // namespace clir::testing
