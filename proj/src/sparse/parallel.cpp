#include "cardio/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstdlib>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

namespace cardio {

namespace {

int env_threads() {
  if (const char* s = std::getenv("CARDIO_THREADS")) {
    const int n = std::atoi(s);
    if (n >= 1) return n;
  }
  return 1;
}

std::atomic<int> g_threads{env_threads()};

// Fixed pool; one job at a time.
class Pool {
 public:
  explicit Pool(int workers) {
    for (int i = 0; i < workers; ++i) threads_.emplace_back([this, i] { loop(i + 1); });
  }
  ~Pool() {
    {
      std::lock_guard lock(m_);
      stop_ = true;
      ++generation_;
    }
    cv_.notify_all();
    for (auto& t : threads_) t.join();
  }
  int size() const { return static_cast<int>(threads_.size()) + 1; }

  void run(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
    std::unique_lock lock(m_);
    job_ = &fn;
    n_ = n;
    pending_ = static_cast<int>(threads_.size());
    ++generation_;
    lock.unlock();
    cv_.notify_all();
    chunk(0, fn);
    lock.lock();
    done_.wait(lock, [this] { return pending_ == 0; });
    job_ = nullptr;
  }

 private:
  void chunk(int id, const std::function<void(std::size_t, std::size_t)>& fn) const {
    const std::size_t parts = static_cast<std::size_t>(size());
    const std::size_t b = n_ * id / parts, e = n_ * (id + 1) / parts;
    if (b < e) fn(b, e);
  }
  void loop(int id) {
    std::size_t seen = 0;
    for (;;) {
      std::unique_lock lock(m_);
      cv_.wait(lock, [&] { return generation_ != seen; });
      seen = generation_;
      if (stop_) return;
      const auto* fn = job_;
      lock.unlock();
      chunk(id, *fn);
      lock.lock();
      if (--pending_ == 0) done_.notify_one();
    }
  }

  std::vector<std::thread> threads_;
  std::mutex m_;
  std::condition_variable cv_, done_;
  const std::function<void(std::size_t, std::size_t)>* job_ = nullptr;
  std::size_t n_ = 0;
  std::size_t generation_ = 0;
  int pending_ = 0;
  bool stop_ = false;
};

std::mutex g_pool_mutex;

}  // namespace

int thread_count() { return g_threads.load(); }

void set_thread_count(int n) { g_threads.store(std::max(1, n)); }

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
  const int t = thread_count();
  if (t <= 1 || n < 4096) {
    fn(0, n);
    return;
  }
  static std::unique_ptr<Pool> pool;
  std::lock_guard lock(g_pool_mutex);
  if (!pool || pool->size() != t) {
    pool.reset();
    pool = std::make_unique<Pool>(t - 1);
  }
  pool->run(n, fn);
}

}  // namespace cardio
