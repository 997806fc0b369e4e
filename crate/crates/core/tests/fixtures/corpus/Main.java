import shop.service.MemoryRepository;
import shop.service.OrderService;

public class Main {
    private OrderService service;

    public Main() {
        service = new OrderService(new MemoryRepository());
    }

    public int run(shop.model.Order order) {
        return service.checkout(order);
    }
}
